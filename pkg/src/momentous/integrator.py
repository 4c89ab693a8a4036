"""Adaptive trajectory integration with dense output and event capture.

The stepper is the Dormand-Prince 5(4) embedded pair (the 5th-order solution
is propagated, the 4th-order companion provides the error estimate) with the
beta-damped PI step-size controller and the quartic dense-output interpolant
of Hairer, Norsett & Wanner, "Solving Ordinary Differential Equations I".

An explicit pair is used deliberately: the moment system is not separable,
and exact conservation of the effective Hamiltonian then serves as an
independent accuracy diagnostic rather than a built-in property.

Recorded along the way:

* samples on a fixed ``sample_dt`` grid (via dense output) plus event points;
* events: momentum sign changes, crossings of caller-supplied position
  markers (classical return points), outbound escape, and violation of the
  uncertainty constraint beyond ``-10 * atol`` (terminal);
* per-sample series: effective Hamiltonian, effective potential at the mean
  position, and the uncertainty-product residual.

Runs are bit-reproducible: identical configuration yields identical output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import (
    ModelConfig,
    MomentState,
    effective_hamiltonian,
    effective_potential,
    make_rhs,
    state_to_vector,
    vector_to_state,
)

__all__ = [
    "Event",
    "IntegratorConfig",
    "Termination",
    "Trajectory",
    "integrate",
    "uncertainty_residual",
]


class Termination(enum.Enum):
    REACHED_TMAX = "reached_tmax"
    ESCAPED = "escaped"
    CONSTRAINT_VIOLATED = "constraint_violated"
    STEP_FAILURE = "step_failure"


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, horizon and output control for one integration."""

    rtol: float = 1e-10
    atol: float = 1e-10
    t_max: float = 20.0
    max_step: float = 0.1
    escape_radius: Optional[float] = None  # None -> 10 * potential half-width
    sample_dt: float = 0.01
    first_step: Optional[float] = None
    max_steps: int = 2_000_000

    def __post_init__(self) -> None:
        for name in ("rtol", "atol", "t_max", "max_step", "sample_dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.escape_radius is not None and not self.escape_radius > 0:
            raise ValueError("escape_radius must be positive")
        if self.first_step is not None and not self.first_step > 0:
            raise ValueError("first_step must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass(frozen=True)
class Event:
    """Located zero crossing of an event function."""

    t: float
    kind: str  # "p_zero" | "q_cross" | "escape" | "constraint"
    direction: int  # +1 the event function rose through zero, -1 it fell
    state: MomentState
    marker: Optional[float] = None


@dataclass(frozen=True)
class _EventSpec:
    fn: Callable[[float, np.ndarray], float]
    kind: str
    terminal: bool = False
    direction: int = 0  # 0 = both directions
    marker: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered samples, derived series, events and the stop reason."""

    model: ModelConfig
    times: np.ndarray
    states: np.ndarray
    h_q: np.ndarray
    v_eff: np.ndarray
    uncertainty: np.ndarray
    termination: Termination
    events: tuple[Event, ...] = ()
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.times)
        if self.states.shape[0] != n:
            raise ValueError("states and times disagree in length")
        for name in ("h_q", "v_eff", "uncertainty"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"series {name} and times disagree in length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("sample times must be strictly increasing")

    @property
    def order(self) -> int:
        return self.model.order

    @property
    def q(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, 1]

    def state(self, i: int) -> MomentState:
        return vector_to_state(self.times[i], self.states[i], self.order)

    @property
    def final_state(self) -> MomentState:
        return self.state(len(self.times) - 1)

    @property
    def energy_drift(self) -> float:
        """Max relative deviation of the effective Hamiltonian from its
        initial value."""
        h0 = self.h_q[0]
        return float(np.max(np.abs(self.h_q - h0)) / abs(h0))


def uncertainty_residual(state: MomentState, hbar: float) -> float:
    """``G20*G02 - G11**2 - hbar**2/4``; negative values violate the
    uncertainty relation."""
    if state.order < 2:
        raise ValueError("uncertainty residual requires truncation order >= 2")
    g20 = state.moment(2, 0)
    g11 = state.moment(1, 1)
    g02 = state.moment(0, 2)
    return g20 * g02 - g11 * g11 - hbar * hbar / 4


# Dormand-Prince 5(4) tableau; row 6 doubles as the 5th-order weights (FSAL).
_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# Difference between the 5th- and 4th-order weights.
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# Dense-output weights for the quartic interpolant.
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

_SAFETY = 0.9
_BETA = 0.04
_EXPO1 = 0.2 - _BETA * 0.75
_FAC_MIN = 0.2  # strongest allowed shrink per step
_FAC_MAX = 10.0  # strongest allowed growth per step


def _rms(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(v * v)))


def _initial_step(f, y0, k1, rtol, atol, span, max_step):
    """Hairer's starting-step heuristic."""
    sc = atol + rtol * np.abs(y0)
    d0 = _rms(y0 / sc)
    d1 = _rms(k1 / sc)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span, max_step)
    f1 = np.asarray(f(y0 + h0 * k1), dtype=float)
    d2 = _rms((f1 - k1) / sc) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span, max_step)


class _DenseOutput:
    """Quartic interpolant over one accepted step."""

    __slots__ = ("t0", "h", "cont")

    def __init__(self, t0, h, y0, y1, k1, k7, kstack):
        ydiff = y1 - y0
        bspl = h * k1 - ydiff
        self.t0 = t0
        self.h = h
        self.cont = (
            y0,
            ydiff,
            bspl,
            ydiff - h * k7 - bspl,
            h * sum(d * k for d, k in zip(_D, kstack)),
        )

    def __call__(self, t):
        theta = (t - self.t0) / self.h
        c0, c1, c2, c3, c4 = self.cont
        return c0 + theta * (c1 + (1 - theta) * (c2 + theta * (c3 + (1 - theta) * c4)))


def _locate_zero(fn, t0, t1, g0, dense):
    """Bisect a sign change of ``fn`` over dense output; ~1e-13 in time."""
    lo, hi = t0, t1
    glo = g0
    for _ in range(200):
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        gm = fn(mid, dense(mid))
        if gm == 0.0:
            return mid
        if (glo < 0.0) == (gm < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _integrate_core(
    f,
    t0: float,
    y0: np.ndarray,
    t_end: float,
    *,
    rtol: float,
    atol: float,
    max_step: float,
    sample_dt: float,
    first_step: Optional[float] = None,
    specs: Sequence[_EventSpec] = (),
    max_steps: int = 2_000_000,
):
    """Generic adaptive loop; returns (times, states, raw events, termination,
    stats). Raw events are ``(t, spec, direction, y)`` tuples."""
    t = t0
    y = np.array(y0, dtype=float)
    k1 = np.asarray(f(y), dtype=float)
    n_rhs = 1
    span = t_end - t0
    if first_step is not None:
        h = min(first_step, span, max_step)
    else:
        h = _initial_step(f, y, k1, rtol, atol, span, max_step)
        n_rhs += 1

    times = [t]
    states = [y.copy()]
    raw_events: list[tuple[float, _EventSpec, int, np.ndarray]] = []
    g_prev = [spec.fn(t, y) for spec in specs]
    sample_index = 1
    facold = 1e-4
    rejected = False
    n_steps = 0
    n_rejected = 0
    termination = Termination.REACHED_TMAX

    def record(tr, yr):
        if tr - times[-1] > 1e-12 * max(1.0, abs(tr)):
            times.append(tr)
            states.append(np.array(yr, dtype=float))

    while t_end - t > 1e-12 * max(1.0, abs(t_end)):
        h = min(h, max_step, t_end - t)
        hmin = 1e-14 * max(1.0, abs(t))
        # Underflow, iteration-budget and blowup guards: the truncated moment
        # hierarchy can develop finite-time blowups, which must surface as a
        # step failure with the partial trajectory intact.
        if h < hmin or n_steps + n_rejected >= max_steps or np.max(np.abs(y)) > 1e12:
            termination = Termination.STEP_FAILURE
            break

        # Stages (FSAL: k1 carried over from the previous step).
        k = [k1]
        failed = False
        for row in _A[:-1]:
            yi = y + h * sum(a * ki for a, ki in zip(row, k))
            if not np.all(np.isfinite(yi)):
                failed = True
                break
            k.append(np.asarray(f(yi), dtype=float))
            n_rhs += 1
        if not failed:
            y1 = y + h * sum(a * ki for a, ki in zip(_A[-1], k))
            if np.all(np.isfinite(y1)):
                k7 = np.asarray(f(y1), dtype=float)
                n_rhs += 1
                k.append(k7)
                err_vec = h * sum(e * ki for e, ki in zip(_E, k))
                sc = atol + rtol * np.maximum(np.abs(y), np.abs(y1))
                err = _rms(err_vec / sc)
            else:
                failed = True
        if failed or not math.isfinite(err):
            n_rejected += 1
            rejected = True
            h *= 0.1
            continue

        fac11 = err ** _EXPO1
        if err > 1.0:
            n_rejected += 1
            rejected = True
            h = h / min(1.0 / _FAC_MIN, fac11 / _SAFETY)
            continue

        # Accepted.
        n_steps += 1
        tnew = t + h
        dense = _DenseOutput(t, h, y, y1, k1, k7, k)

        # Events on (t, tnew].
        located: list[tuple[float, _EventSpec, int]] = []
        g_new = []
        for spec, g0 in zip(specs, g_prev):
            g1 = spec.fn(tnew, y1)
            g_new.append(g1)
            crossed = (g0 < 0.0 < g1) or (g0 > 0.0 > g1) or (g0 != 0.0 and g1 == 0.0)
            if not crossed:
                continue
            direction = 1 if g0 < 0.0 else -1
            if spec.direction and spec.direction != direction:
                continue
            te = tnew if g1 == 0.0 else _locate_zero(spec.fn, t, tnew, g0, dense)
            located.append((te, spec, direction))
        located.sort(key=lambda item: item[0])

        cut = tnew
        terminal_spec = None
        kept_events = []
        for te, spec, direction in located:
            kept_events.append((te, spec, direction))
            if spec.terminal:
                cut = te
                terminal_spec = spec
                break

        # Merge grid samples and event points in time order.
        pending = [(te, dense(te), spec, direction) for te, spec, direction in kept_events]
        while True:
            ts = t0 + sample_index * sample_dt
            if ts > cut + 1e-9 * sample_dt:
                break
            ts_clip = min(ts, cut)
            pending.append((ts_clip, y1 if ts_clip >= tnew else dense(ts_clip), None, 0))
            sample_index += 1
        pending.sort(key=lambda item: item[0])
        for tr, yr, spec, direction in pending:
            record(tr, yr)
            if spec is not None:
                raw_events.append((tr, spec, direction, np.array(yr, dtype=float)))

        if terminal_spec is not None:
            termination = (
                Termination.ESCAPED
                if terminal_spec.kind == "escape"
                else Termination.CONSTRAINT_VIOLATED
            )
            t, y = cut, np.array(dense(cut), dtype=float)
            break

        # PI controller update.
        fac = fac11 / facold ** _BETA
        fac = max(1.0 / _FAC_MAX, min(1.0 / _FAC_MIN, fac / _SAFETY))
        hnew = h / fac
        if rejected:
            hnew = min(hnew, h)
        facold = max(err, 1e-4)
        rejected = False

        t, y, k1, g_prev = tnew, y1, k7, g_new
        h = hnew

    record(t, y)
    stats = {"n_steps": n_steps, "n_rejected": n_rejected, "n_rhs": n_rhs}
    return times, states, raw_events, termination, stats


def integrate(
    init: MomentState,
    model: ModelConfig,
    icfg: IntegratorConfig,
    mark_positions: Sequence[float] = (),
) -> Trajectory:
    """Propagate ``init`` to ``t_max`` or an early stop.

    Early stops: outbound escape through ``|q| = escape_radius`` (default
    ``10 *`` the potential half-width), uncertainty residual below
    ``-10 * atol`` (orders >= 2), or step-size underflow. ``mark_positions``
    adds recorded (non-terminal) crossing events, typically the classical
    return points.
    """
    if init.order != model.order:
        raise ValueError(
            f"initial state order {init.order} does not match model order {model.order}"
        )
    radius = (
        icfg.escape_radius
        if icfg.escape_radius is not None
        else 10.0 * model.potential.a
    )

    specs: list[_EventSpec] = [_EventSpec(lambda t, y: y[1], kind="p_zero")]
    for marker in mark_positions:
        specs.append(
            _EventSpec(
                (lambda mk: lambda t, y: y[0] - mk)(float(marker)),
                kind="q_cross",
                marker=float(marker),
            )
        )
    specs.append(
        _EventSpec(
            lambda t, y: abs(y[0]) - radius,
            kind="escape",
            terminal=True,
            direction=1,
        )
    )
    if model.order >= 2:
        quarter = model.hbar * model.hbar / 4
        floor = -10.0 * icfg.atol

        def constraint(t, y):
            return (y[2] * y[4] - y[3] * y[3] - quarter) - floor

        specs.append(
            _EventSpec(constraint, kind="constraint", terminal=True, direction=-1)
        )

    f = make_rhs(model)
    times, states, raw_events, termination, stats = _integrate_core(
        f,
        init.t,
        state_to_vector(init),
        init.t + icfg.t_max,
        rtol=icfg.rtol,
        atol=icfg.atol,
        max_step=icfg.max_step,
        sample_dt=icfg.sample_dt,
        first_step=icfg.first_step,
        specs=specs,
        max_steps=icfg.max_steps,
    )

    order = model.order
    t_arr = np.array(times, dtype=float)
    y_arr = np.vstack(states)
    n = len(t_arr)
    h_q = np.empty(n)
    v_eff = np.empty(n)
    for i in range(n):
        state = vector_to_state(t_arr[i], y_arr[i], order)
        h_q[i] = effective_hamiltonian(state, model)
        v_eff[i] = effective_potential(state.q, state, model)
    if order >= 2:
        quarter = model.hbar * model.hbar / 4
        uncertainty = y_arr[:, 2] * y_arr[:, 4] - y_arr[:, 3] ** 2 - quarter
    else:
        uncertainty = np.full(n, np.nan)

    events = tuple(
        Event(
            t=te,
            kind=spec.kind,
            direction=direction,
            state=vector_to_state(te, ye, order),
            marker=spec.marker,
        )
        for te, spec, direction, ye in raw_events
    )
    return Trajectory(
        model=model,
        times=t_arr,
        states=y_arr,
        h_q=h_q,
        v_eff=v_eff,
        uncertainty=uncertainty,
        termination=termination,
        events=events,
        stats=stats,
    )
