"""Outcome readout: measured from trajectories, predicted from sign laws."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from pilotkey.core.errors import AmbiguousOutcomeError, DegenerateInputError
from pilotkey.core.models import Outcome
from pilotkey.core.utils import strict_sign
from pilotkey.physics.wavefunction import separation_coordinate


if TYPE_CHECKING:
    from pilotkey.core.models import InitialPositions, PhysParams, TrajectoryPair
    from pilotkey.core.types import FloatArray


DEAD_ZONE = 1e-6


def outcome_from_final(
    z1: float, z2: float, sigma0: float, dead_zone: float = DEAD_ZONE
) -> Outcome:
    """Which side of the xy plane each particle reached."""
    band = dead_zone * sigma0
    if abs(z1) < band or abs(z2) < band:
        msg = f"final position ({z1:.3g}, {z2:.3g}) within {band:.1e} of the plane"
        raise AmbiguousOutcomeError(msg)
    return Outcome(w_a=1 if z1 > 0 else -1, w_b=1 if z2 > 0 else -1)


def outcomes_from_final(
    z1: FloatArray, z2: FloatArray, sigma0: float, dead_zone: float = DEAD_ZONE
) -> tuple[np.ndarray, np.ndarray]:
    """Batch readout; raises on the first pair inside the dead zone."""
    band = dead_zone * sigma0
    ambiguous = (np.abs(z1) < band) | (np.abs(z2) < band)
    if np.any(ambiguous):
        first = int(np.argmax(ambiguous))
        msg = f"pair {first} of batch ended within {band:.1e} of the plane"
        raise AmbiguousOutcomeError(msg)
    return np.where(z1 > 0, 1, -1), np.where(z2 > 0, 1, -1)


def outcome_measured(traj: TrajectoryPair, dead_zone: float = DEAD_ZONE) -> Outcome:
    """Read (W_A, W_B) from the last sample of a trajectory.

    Raises:
        AmbiguousOutcomeError: The run ended too close to the plane; integrate longer.
    """
    return outcome_from_final(
        float(traj.z1[-1]), float(traj.z2[-1]), traj.params.sigma0, dead_zone
    )


def outcome_predicted(initial: InitialPositions, s: int) -> Outcome:
    """Sign law: W_A = -sgn(z20) s, W_B = sgn(z20)."""
    if initial.z20 == 0.0:
        msg = "z20 = 0 lies on the symmetry axis; the sign law is undefined"
        raise DegenerateInputError(msg)
    w_b = strict_sign(initial.z20)
    return Outcome(w_a=-w_b * s, w_b=w_b)


def outcome_exact(initial: InitialPositions, s: int, p: PhysParams) -> Outcome:
    """Outcome conserved by the guidance law: W_A = sgn(z10 - s K z20), W_B = -s W_A.

    Agrees with ``outcome_predicted`` whenever K |z20| > |z10|.
    """
    u0 = float(separation_coordinate(initial.z10, initial.z20, p, s))
    w_a = strict_sign(u0)
    return Outcome(w_a=w_a, w_b=-s * w_a)
