"""Gaussian wavepacket initial data for the moment system.

A packet centered at (q0, p0) with position spread sigma0 induces second
moments that saturate the uncertainty relation exactly:
``G20 = sigma0**2``, ``G11 = 0``, ``G02 = (hbar / (2 sigma0))**2``.

Third moments come in two conventions (see ``initial_moments``): the
default "skewed" convention sets ``G03 = -hbar**2 p0 / sigma0**2`` with the
other three zero; the "zero" convention zeroes all four, which is the
symmetric-packet value. Arithmetic is type-preserving, so exact
(``fractions.Fraction``) inputs yield exact moments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import MomentState

__all__ = ["GaussianPacket", "InvalidOrder", "THIRD_MOMENT_CONVENTIONS", "initial_moments"]

THIRD_MOMENT_CONVENTIONS = ("skewed", "zero")


class InvalidOrder(ValueError):
    """Initial moments exist only for truncation orders 2 and 3."""


@dataclass(frozen=True)
class GaussianPacket:
    """Minimum-uncertainty packet: mean position, mean momentum, spread."""

    q0: float
    p0: float
    sigma0: float = 0.5
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")


def initial_moments(
    packet: GaussianPacket, order: int, third_moment_convention: str = "skewed"
) -> MomentState:
    """Moment state of the packet at t = 0 for a truncation order of 2 or 3.

    The second moments saturate ``G20*G02 - G11**2 = hbar**2/4`` exactly.
    """
    if order not in (2, 3):
        raise InvalidOrder(f"truncation order must be 2 or 3, got {order}")
    if third_moment_convention not in THIRD_MOMENT_CONVENTIONS:
        raise ValueError(
            f"third_moment_convention must be one of {THIRD_MOMENT_CONVENTIONS}"
        )
    g20 = packet.sigma0 * packet.sigma0
    g11 = 0 * packet.sigma0
    g02 = (packet.hbar / (2 * packet.sigma0)) ** 2
    moments = (g20, g11, g02)
    if order == 3:
        zero = 0 * packet.sigma0
        if third_moment_convention == "skewed":
            g03 = -(packet.hbar ** 2) * packet.p0 / packet.sigma0 ** 2
        else:
            g03 = zero
        moments = moments + (zero, zero, zero, g03)
    return MomentState(t=0.0, q=packet.q0, p=packet.p0, moments=moments)
