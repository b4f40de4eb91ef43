"""CHSH estimation from announced test rounds."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

from pilotkey.config.settings import ProtocolSettings
from pilotkey.core.errors import InsufficientStatisticsError
from pilotkey.core.models import ChshAngles, ChshEstimate
from pilotkey.core.types import ORTHOGONAL, OutcomeMode
from pilotkey.protocol.rounds import generate_rounds


if TYPE_CHECKING:
    from pilotkey.core.models import PhysParams, ProtocolRound


logger = logging.getLogger(__name__)

QUANTUM_BOUND = 2.0 * math.sqrt(2.0)
MIN_ROUNDS_PER_TERM = 100


def chsh_estimate(
    test_rounds: list[ProtocolRound],
    angle_set: ChshAngles | None = None,
    min_per_term: int = MIN_ROUNDS_PER_TERM,
) -> ChshEstimate:
    """S = E(a,b) - E(a,b') + E(a',b) + E(a',b') from per-round products W_A s W_B.

    With W_B = s sigma_B the product is sigma_A sigma_B, so the singlet gives
    E = -cos(angle difference) and S = -2 sqrt(2) at the default axes.

    Raises:
        InsufficientStatisticsError: A term has fewer than ``min_per_term`` rounds.
    """
    angles = angle_set or ChshAngles()
    value = 0.0
    variance = 0.0
    correlations: dict[str, float] = {}
    counts: dict[str, int] = {}
    for label, alice, bob, sign in angles.terms():
        products = [
            r.outcome.w_a * r.settings.s * r.outcome.w_b
            for r in test_rounds
            if r.outcome is not None
            and math.isclose(r.alice_angle, alice)
            and math.isclose(r.bob_angle, bob)
        ]
        if len(products) < min_per_term:
            msg = f"term ({label}) has {len(products)} rounds, need {min_per_term}"
            raise InsufficientStatisticsError(msg)
        e = sum(products) / len(products)
        correlations[label] = e
        counts[label] = len(products)
        value += sign * e
        variance += (1.0 - e * e) / len(products)
    return ChshEstimate(
        value=value, std_error=math.sqrt(variance), correlations=correlations, counts=counts
    )


def simulate_bell_rounds(
    n: int,
    p: PhysParams,
    master_seed: int,
    angles: ChshAngles | None = None,
    intercept_fraction: float = 0.0,
    workers: int = 1,
) -> list[ProtocolRound]:
    """Oracle-mode rounds with every device pair set orthogonal, for CHSH runs."""
    protocol = ProtocolSettings(
        chsh_angles=angles or ChshAngles(),
        intercept_fraction=intercept_fraction,
        fixed_delta=ORTHOGONAL,
        workers=workers,
    )
    rounds = generate_rounds(n, p, master_seed, OutcomeMode.QUANTUM_ORACLE, protocol)
    logger.info("Simulated %d Bell rounds (intercept %.0f%%)", n, 100 * intercept_fraction)
    return rounds
