"""Formal Poisson algebra of Weyl-ordered central moments.

A moment is indexed by a pair ``(a, b)``: ``a`` powers of the position
fluctuation times ``b`` powers of the momentum fluctuation, Weyl ordered.
``(1, 0)`` and ``(0, 1)`` are permitted as formal symbols but are identically
zero, so canonical form eliminates any term containing them.

Two things live here:

* ``bracket_formula`` -- the closed-form moment bracket: two bilinear product
  terms plus a contraction sum over odd ``n`` with integer weights
  ``k_coefficient(n, a, b, c, d)`` and even powers of hbar. It is implemented
  literally, with the summation range ``1 <= n < min(a+c, b+d, a+b, c+d)``.
* ``verify_eom_consistency`` -- assembles time derivatives from that bracket
  and compares them term by term against the hand-coded tables integrated by
  :mod:`momentous.dynamics`. The strict summation range leaves several
  low-order brackets empty (for example ``{G11, G02}``), so a known set of
  equations cannot be reproduced; the report flags those as KNOWN instead of
  failing. Mismatches are data, not errors.

Coefficients are exact rationals throughout; floats appear only when a
polynomial is numerically evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

__all__ = [
    "EquationCheck",
    "ConsistencyReport",
    "MomentPolynomial",
    "RangeViolation",
    "Term",
    "bracket_formula",
    "hamiltonian_terms",
    "assemble_rhs",
    "k_coefficient",
    "verify_eom_consistency",
]

Moment = tuple[int, int]
Scalar = Union[int, float, Fraction]


class RangeViolation(ValueError):
    """Contraction index n lies outside the bracket's summation range."""


def _validate_moment(index: Moment) -> Moment:
    a, b = index
    if a < 0 or b < 0:
        raise ValueError(f"moment powers must be non-negative, got {index}")
    return (int(a), int(b))


def k_coefficient(n: int, a: int, b: int, c: int, d: int) -> int:
    """Integer weight of the hbar**(n-1) contraction in the moment bracket.

    Defined for odd ``n`` with ``1 <= n < min(a+c, b+d, a+b, c+d)``; binomial
    coefficients with lower index above the upper are zero. Callers iterating
    the bracket sum must filter the range themselves.
    """
    for name, v in (("a", a), ("b", b), ("c", c), ("d", d)):
        if v < 0:
            raise ValueError(f"{name} must be non-negative")
    if n < 1 or n % 2 == 0 or n >= min(a + c, b + d, a + b, c + d):
        raise RangeViolation(
            f"n={n} outside odd range [1, min(a+c, b+d, a+b, c+d)) for "
            f"(a, b, c, d)=({a}, {b}, {c}, {d})"
        )
    total = 0
    for s in range(n + 1):
        total += (
            (-1) ** s
            * math.factorial(s)
            * math.factorial(n - s)
            * math.comb(a, s)
            * math.comb(b, n - s)
            * math.comb(c, n - s)
            * math.comb(d, s)
        )
    return total


@dataclass(frozen=True)
class Term:
    """One monomial: product of moments, powers of hbar, p and mass, and an
    optional derivative of the potential ``V^(v_order)``.

    The numeric coefficient is *not* part of the term; it is the map value in
    :class:`MomentPolynomial`.
    """

    moments: tuple[Moment, ...] = ()
    hbar_power: int = 0
    v_order: Optional[int] = None
    p_power: int = 0
    mass_power: int = 0

    def moment_order(self) -> int:
        """Combined semiclassical order: moment powers plus 2 per hbar."""
        return sum(a + b for a, b in self.moments) + 2 * self.hbar_power

    def sort_key(self):
        return (
            self.moment_order(),
            self.moments,
            self.hbar_power,
            self.v_order is not None,
            self.v_order if self.v_order is not None else -1,
            self.p_power,
            -self.mass_power,
        )

    def contains_first_moment(self) -> bool:
        return any(a + b == 1 for a, b in self.moments)


def _canonical_moments(moments: Iterable[Moment]) -> tuple[Moment, ...]:
    cleaned = [(int(a), int(b)) for a, b in moments if (a, b) != (0, 0)]
    return tuple(sorted(cleaned))


class MomentPolynomial:
    """Finite rational-coefficient combination of :class:`Term` monomials.

    Canonical form: moment multisets sorted, zero coefficients removed, and
    any term containing a first moment (``(1, 0)`` or ``(0, 1)``) eliminated.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Term, Scalar]] = None) -> None:
        self._terms: dict[Term, Fraction] = {}
        if terms:
            for term, coeff in terms.items():
                self.add(coeff, term)

    def add(
        self,
        coeff: Scalar,
        term: Optional[Term] = None,
        **term_fields,
    ) -> "MomentPolynomial":
        """Accumulate ``coeff * term``; returns self for chaining."""
        if term is None:
            term = Term(**term_fields)
        elif term_fields:
            raise TypeError("pass either a Term or field keywords, not both")
        term = Term(
            moments=_canonical_moments(term.moments),
            hbar_power=term.hbar_power,
            v_order=term.v_order,
            p_power=term.p_power,
            mass_power=term.mass_power,
        )
        if term.contains_first_moment():
            return self
        total = self._terms.get(term, Fraction(0)) + Fraction(coeff)
        if total == 0:
            self._terms.pop(term, None)
        else:
            self._terms[term] = total
        return self

    def items(self) -> Iterator[tuple[Term, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda kv: kv[0].sort_key()))

    def coefficient(self, term: Term) -> Fraction:
        key = Term(
            moments=_canonical_moments(term.moments),
            hbar_power=term.hbar_power,
            v_order=term.v_order,
            p_power=term.p_power,
            mass_power=term.mass_power,
        )
        return self._terms.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        raise TypeError("MomentPolynomial is mutable and unhashable")

    def __add__(self, other: "MomentPolynomial") -> "MomentPolynomial":
        out = self.copy()
        for term, coeff in other._terms.items():
            out.add(coeff, term)
        return out

    def __sub__(self, other: "MomentPolynomial") -> "MomentPolynomial":
        return self + other.scaled(-1)

    def __neg__(self) -> "MomentPolynomial":
        return self.scaled(-1)

    def copy(self) -> "MomentPolynomial":
        out = MomentPolynomial()
        out._terms = dict(self._terms)
        return out

    def scaled(self, factor: Scalar) -> "MomentPolynomial":
        out = MomentPolynomial()
        if factor == 0:
            return out
        f = Fraction(factor)
        out._terms = {t: c * f for t, c in self._terms.items()}
        return out

    def times(
        self,
        coeff: Scalar,
        *,
        v_order: Optional[int] = None,
        p_power: int = 0,
        mass_power: int = 0,
        hbar_power: int = 0,
        moments: tuple[Moment, ...] = (),
    ) -> "MomentPolynomial":
        """Multiply every term by an extra monomial factor."""
        out = MomentPolynomial()
        for term, c in self._terms.items():
            if v_order is not None and term.v_order is not None:
                raise ValueError("product of two potential-derivative factors")
            out.add(
                c * Fraction(coeff),
                Term(
                    moments=term.moments + tuple(moments),
                    hbar_power=term.hbar_power + hbar_power,
                    v_order=term.v_order if v_order is None else v_order,
                    p_power=term.p_power + p_power,
                    mass_power=term.mass_power + mass_power,
                ),
            )
        return out

    def truncated(self, order: int) -> "MomentPolynomial":
        """Drop terms whose combined semiclassical order exceeds ``order``."""
        out = MomentPolynomial()
        for term, coeff in self._terms.items():
            if term.moment_order() <= order:
                out.add(coeff, term)
        return out

    def substitute_hbar(self, hbar: Scalar) -> "MomentPolynomial":
        out = MomentPolynomial()
        h = Fraction(hbar)
        for term, coeff in self._terms.items():
            out.add(
                coeff * h ** term.hbar_power,
                Term(
                    moments=term.moments,
                    hbar_power=0,
                    v_order=term.v_order,
                    p_power=term.p_power,
                    mass_power=term.mass_power,
                ),
            )
        return out

    def substitute_mass(self, mass: Scalar) -> "MomentPolynomial":
        out = MomentPolynomial()
        m = Fraction(mass)
        for term, coeff in self._terms.items():
            out.add(
                coeff * m ** term.mass_power,
                Term(
                    moments=term.moments,
                    hbar_power=term.hbar_power,
                    v_order=term.v_order,
                    p_power=term.p_power,
                    mass_power=0,
                ),
            )
        return out

    def evaluate(
        self,
        moments: Mapping[Moment, float],
        *,
        v_derivs: Sequence[float] = (),
        p: float = 0.0,
        mass: float = 1.0,
        hbar: float = 1.0,
    ) -> float:
        """Numeric value given moment values and potential derivatives.

        ``v_derivs[k]`` supplies ``V^(k)`` at the evaluation point; moments
        missing from the mapping count as zero.
        """
        total = 0.0
        for term, coeff in self._terms.items():
            value = float(coeff)
            for idx in term.moments:
                value *= moments.get(idx, 0.0)
            if term.v_order is not None:
                value *= v_derivs[term.v_order]
            value *= p ** term.p_power
            value *= mass ** term.mass_power
            value *= hbar ** term.hbar_power
            total += value
        return total

    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, (term, coeff) in enumerate(self.items()):
            parts.append(_format_term(coeff, term, first=i == 0))
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"MomentPolynomial({self.to_text()})"


def _format_coeff(c: Fraction) -> str:
    return str(c) if c.denominator != 1 else str(c.numerator)


def _format_term(coeff: Fraction, term: Term, first: bool) -> str:
    sign = "-" if coeff < 0 else "+"
    mag = abs(coeff)
    factors = []
    if mag != 1 or (
        not term.moments
        and term.v_order is None
        and term.p_power == 0
        and term.mass_power == 0
        and term.hbar_power == 0
    ):
        factors.append(f"({_format_coeff(mag)})" if mag.denominator != 1 else _format_coeff(mag))
    if term.hbar_power:
        factors.append("hbar" if term.hbar_power == 1 else f"hbar^{term.hbar_power}")
    if term.v_order is not None:
        factors.append("V" + "'" * term.v_order if term.v_order else "V")
    if term.p_power:
        factors.append("p" if term.p_power == 1 else f"p^{term.p_power}")
    for a, b in term.moments:
        factors.append(f"G{a}{b}")
    body = "*".join(factors) if factors else "1"
    if term.mass_power:
        if term.mass_power == -1:
            body += "/m"
        elif term.mass_power < 0:
            body += f"/m^{-term.mass_power}"
        else:
            body += "*m" if term.mass_power == 1 else f"*m^{term.mass_power}"
    if first and sign == "+":
        return body
    return f"{sign} {body}" if not first else f"- {body}"


def bracket_formula(
    lhs: Moment, rhs: Moment, hbar: Optional[Scalar] = None
) -> MomentPolynomial:
    """Poisson bracket of two moments, straight from the closed formula.

    Product part ``ad * G(a-1,b) G(c,d-1) - bc * G(a,b-1) G(c-1,d)`` plus the
    contraction sum over odd ``n`` in ``[1, min(a+c, b+d, a+b, c+d))`` with
    weight ``k_coefficient`` and prefactor ``(i*hbar/2)**(n-1)``; only odd
    ``n`` occur, so the prefactor is the real number
    ``(-1)**((n-1)/2) * (hbar/2)**(n-1)``.

    With ``hbar=None`` the result stays symbolic (terms carry ``hbar_power``);
    a numeric ``hbar`` is folded into the rational coefficients exactly.
    """
    a, b = _validate_moment(lhs)
    c, d = _validate_moment(rhs)
    if a + b < 2 or c + d < 2:
        raise ValueError("bracket_formula expects genuine moments (a + b >= 2)")
    poly = MomentPolynomial()
    poly.add(a * d, moments=((a - 1, b), (c, d - 1)))
    poly.add(-b * c, moments=((a, b - 1), (c - 1, d)))
    for n in range(1, min(a + c, b + d, a + b, c + d), 2):
        weight = k_coefficient(n, a, b, c, d)
        if weight == 0:
            continue
        coeff = Fraction(weight * (-1) ** ((n - 1) // 2), 2 ** (n - 1))
        power = n - 1
        if hbar is not None:
            coeff *= Fraction(hbar) ** power
            power = 0
        poly.add(coeff, moments=((a + c - n, b + d - n),), hbar_power=power)
    return poly


def hamiltonian_terms(order: int) -> MomentPolynomial:
    """Moment expansion of the effective Hamiltonian at a truncation order.

    ``p^2/2m + V + G02/2m + (1/2) V'' G20``, plus ``(1/6) V''' G30`` at
    order 3. Order 0 is the bare classical Hamiltonian.
    """
    if order not in (0, 2, 3):
        raise ValueError("truncation order must be 0, 2 or 3")
    h = MomentPolynomial()
    h.add(Fraction(1, 2), p_power=2, mass_power=-1)
    h.add(1, v_order=0)
    if order >= 2:
        h.add(Fraction(1, 2), mass_power=-1, moments=((0, 2),))
        h.add(Fraction(1, 2), v_order=2, moments=((2, 0),))
    if order >= 3:
        h.add(Fraction(1, 6), v_order=3, moments=((3, 0),))
    return h


Variable = Union[str, Moment]


def assemble_rhs(var: Variable, order: int, truncate: bool = True) -> MomentPolynomial:
    """Time derivative of ``var`` generated by the bracket formula.

    ``var`` is ``"q"``, ``"p"`` or a moment pair. Mean variables follow the
    elementary brackets ``{q, p} = 1`` and ``{q or p, G} = 0``, which reduce
    to partial derivatives of the Hamiltonian's coefficient functions; moment
    variables use :func:`bracket_formula` against each Hamiltonian term.
    When ``truncate`` is set, products whose combined moment order exceeds the
    truncation order are dropped, matching the closure of the integrated
    system.
    """
    hamiltonian = hamiltonian_terms(order)
    out = MomentPolynomial()
    for term, coeff in hamiltonian.items():
        if var == "q":
            if term.p_power:
                out.add(
                    coeff * term.p_power,
                    Term(
                        moments=term.moments,
                        hbar_power=term.hbar_power,
                        v_order=term.v_order,
                        p_power=term.p_power - 1,
                        mass_power=term.mass_power,
                    ),
                )
        elif var == "p":
            if term.v_order is not None:
                out.add(
                    -coeff,
                    Term(
                        moments=term.moments,
                        hbar_power=term.hbar_power,
                        v_order=term.v_order + 1,
                        p_power=term.p_power,
                        mass_power=term.mass_power,
                    ),
                )
        else:
            index = _validate_moment(var)
            for factor in term.moments:
                rest = list(term.moments)
                rest.remove(factor)
                bracket = bracket_formula(index, factor)
                out = out + bracket.times(
                    coeff,
                    v_order=term.v_order,
                    p_power=term.p_power,
                    mass_power=term.mass_power,
                    hbar_power=term.hbar_power,
                    moments=tuple(rest),
                )
    if truncate:
        out = out.truncated(order)
    return out


@dataclass(frozen=True)
class EquationCheck:
    """Per-equation comparison between the bracket assembly and the table."""

    variable: str
    assembled: MomentPolynomial
    table: MomentPolynomial
    missing: MomentPolynomial  # present in the table, absent or off in the assembly
    extra: MomentPolynomial  # produced by the assembly, absent from the table
    known: bool

    @property
    def matches(self) -> bool:
        return self.missing.is_zero() and self.extra.is_zero()

    def status(self) -> str:
        if self.matches:
            return "MATCH"
        return "MISMATCH (KNOWN)" if self.known else "MISMATCH (UNEXPECTED)"


# Equations whose bracket assembly is short because the contraction range
# 1 <= n < min(a+c, b+d, a+b, c+d) is empty for the brackets feeding them.
_KNOWN_SHORT: dict[int, frozenset[str]] = {
    2: frozenset({"dG11/dt"}),
    3: frozenset({"dG11/dt", "dG21/dt", "dG12/dt"}),
}

_NOTES: tuple[str, ...] = (
    "momentum equation: the integrated table uses dp/dt = -V' - (1/2)V'''*G20"
    " (- (1/6)V''''*G30 at order 3); the alternative reading dp/dt = 2V''*G11"
    " duplicates the G02 equation and does not conserve the effective"
    " Hamiltonian, so it is rejected.",
    "contraction range 1 <= n < min(a+c, b+d, a+b, c+d) is empty for"
    " {G11,G02}, {G11,G20}, {G11,G30}, {G21,G20} and {G12,G02}; the equations"
    " assembled from those brackets come out short and are flagged KNOWN.",
    "bracket products whose combined moment order exceeds the truncation"
    " order are dropped before comparison, matching the closure of the"
    " integrated system.",
)


def _variable_name(var: Variable) -> str:
    if isinstance(var, str):
        return f"d{var}/dt"
    a, b = var
    return f"dG{a}{b}/dt"


def verify_eom_consistency(
    order: int, mass: Optional[Scalar] = None
) -> "ConsistencyReport":
    """Compare bracket-assembled time derivatives with the integrated tables.

    ``mass`` substitutes a numeric (exact rational) mass into both sides
    before comparison; by default the mass stays symbolic. Mismatches are
    reported, not raised; the ones rooted in the empty contraction range are
    flagged as known.
    """
    from . import dynamics

    if order not in (2, 3):
        raise ValueError("consistency check supports orders 2 and 3")
    table = dynamics.eom_table(order)
    known = _KNOWN_SHORT[order]
    checks = []
    for var in dynamics.state_variables(order):
        name = _variable_name(var)
        assembled = assemble_rhs(var, order)
        expected = table[var]
        if mass is not None:
            assembled = assembled.substitute_mass(mass)
            expected = expected.substitute_mass(mass)
        missing = MomentPolynomial()
        extra = MomentPolynomial()
        for term, coeff in expected.items():
            delta = coeff - assembled.coefficient(term)
            if delta != 0:
                missing.add(delta, term)
        for term, coeff in assembled.items():
            if expected.coefficient(term) == 0:
                extra.add(coeff, term)
        checks.append(
            EquationCheck(
                variable=name,
                assembled=assembled,
                table=expected,
                missing=missing,
                extra=extra,
                known=name in known,
            )
        )
    return ConsistencyReport(order=order, checks=tuple(checks), notes=_NOTES)


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of :func:`verify_eom_consistency` for one truncation order."""

    order: int
    checks: tuple[EquationCheck, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def unexpected(self) -> tuple[EquationCheck, ...]:
        return tuple(c for c in self.checks if not c.matches and not c.known)

    def to_text(self) -> str:
        lines = [f"equations of motion, truncation order {self.order}"]
        width = max(len(c.variable) for c in self.checks)
        for c in self.checks:
            lines.append(f"  {c.variable:<{width}}  {c.status()}")
            lines.append(f"    table   : {c.table.to_text()}")
            lines.append(f"    formula : {c.assembled.to_text()}")
            if not c.missing.is_zero():
                lines.append(f"    missing : {c.missing.to_text()}")
            if not c.extra.is_zero():
                lines.append(f"    extra   : {c.extra.to_text()}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "notes": list(self.notes),
            "equations": [
                {
                    "variable": c.variable,
                    "status": c.status(),
                    "table": c.table.to_text(),
                    "formula": c.assembled.to_text(),
                    "missing": c.missing.to_text(),
                    "extra": c.extra.to_text(),
                }
                for c in self.checks
            ],
        }
