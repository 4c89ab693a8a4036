"""Outcome tagging for integrated trajectories.

A below-barrier run (barrier top above the energy) ends in exactly one of
four tags, judged from the final sampled state against the classical return
points ``+-x`` widened by a margin:

* ``TUNNELED``  -- final position beyond ``x + margin`` moving right;
* ``REFLECTED`` -- final position beyond ``-x - margin`` moving left;
  both require having approached within ``2x`` of the barrier center, which
  keeps the tags mirror-symmetric and rejects runs that never interacted;
* ``TRAPPED``   -- still inside ``|q| < x + margin`` at the time horizon with
  at least two momentum sign changes inside that window (the tag is
  horizon-relative: trapped particles leave eventually);
* ``UNDETERMINED`` otherwise, including above-barrier runs and integrations
  that stopped on a constraint violation or step failure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .integrator import Termination, Trajectory
from .potential import BarrierPotential

__all__ = ["Evidence", "InvalidMargin", "Outcome", "Tag", "classify"]


class InvalidMargin(ValueError):
    """Classification margin must be non-negative."""


class Tag(enum.Enum):
    REFLECTED = "reflected"
    TUNNELED = "tunneled"
    TRAPPED = "trapped"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Evidence:
    """Measurements backing a tag; times lie within the trajectory span."""

    barrier_entry_time: Optional[float]
    barrier_exit_time: Optional[float]
    barrier_exit_side: Optional[int]  # +1 right, -1 left
    sign_changes_inside: int
    final_q: float
    final_p: float
    time_horizon: float
    reason: str = ""


@dataclass(frozen=True)
class Outcome:
    tag: Tag
    evidence: Evidence


def _momentum_flips(traj: Trajectory) -> list[tuple[float, float]]:
    """(time, position) of momentum sign changes; integrator events when
    available, otherwise sample-level sign flips (synthetic trajectories)."""
    flips = [(e.t, e.state.q) for e in traj.events if e.kind == "p_zero"]
    if flips:
        return flips
    p = traj.p
    q = traj.q
    t = traj.times
    out = []
    for i in range(len(p) - 1):
        if p[i] == 0.0 or p[i] * p[i + 1] >= 0.0:
            continue
        w = p[i] / (p[i] - p[i + 1])
        out.append((float(t[i] + w * (t[i + 1] - t[i])), float(q[i] + w * (q[i + 1] - q[i]))))
    return out


def classify(
    traj: Trajectory,
    pot: BarrierPotential,
    energy: float,
    margin: Optional[float] = None,
) -> Outcome:
    """Tag a terminated trajectory; ``margin`` defaults to ``0.05 * a``."""
    if margin is None:
        margin = 0.05 * pot.a
    if margin < 0:
        raise InvalidMargin("margin must be non-negative")

    q = traj.q
    p = traj.p
    t = traj.times
    final_q = float(q[-1])
    final_p = float(p[-1])
    horizon = float(t[-1])

    ratio = pot.energy_ratio(energy)

    def undetermined(reason, entry=None, exit_t=None, side=None, flips_inside=0):
        return Outcome(
            Tag.UNDETERMINED,
            Evidence(
                barrier_entry_time=entry,
                barrier_exit_time=exit_t,
                barrier_exit_side=side,
                sign_changes_inside=flips_inside,
                final_q=final_q,
                final_p=final_p,
                time_horizon=horizon,
                reason=reason,
            ),
        )

    if ratio <= 1.0:
        return undetermined("energy at or above the barrier top")

    x = pot.turning_points(energy)[1]
    window = x + margin

    inside = np.abs(q) < x
    entry = float(t[np.argmax(inside)]) if inside.any() else None
    exit_t = None
    side = None
    leaving = np.where(inside[:-1] & ~inside[1:])[0]
    if leaving.size:
        j = int(leaving[-1]) + 1
        exit_t = float(t[j])
        side = 1 if q[j] > 0 else -1

    flips = _momentum_flips(traj)
    flips_inside = sum(1 for _, fq in flips if abs(fq) < window)

    evidence = Evidence(
        barrier_entry_time=entry,
        barrier_exit_time=exit_t,
        barrier_exit_side=side,
        sign_changes_inside=flips_inside,
        final_q=final_q,
        final_p=final_p,
        time_horizon=horizon,
    )

    if traj.termination in (Termination.CONSTRAINT_VIOLATED, Termination.STEP_FAILURE):
        return undetermined(
            f"integration stopped early: {traj.termination.value}",
            entry,
            exit_t,
            side,
            flips_inside,
        )

    approached = float(np.min(np.abs(q))) <= 2 * x
    if final_q > window and final_p > 0 and approached:
        return Outcome(Tag.TUNNELED, evidence)
    if final_q < -window and final_p < 0 and approached:
        return Outcome(Tag.REFLECTED, evidence)
    if (
        abs(final_q) < window
        and flips_inside >= 2
        and traj.termination is Termination.REACHED_TMAX
    ):
        return Outcome(Tag.TRAPPED, evidence)
    return undetermined("no rule matched", entry, exit_t, side, flips_inside)
