"""Public discussion: test-subset announcement, abort checks and key extraction."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

from scipy.stats import norm

from pilotkey.core.errors import AbortedSessionError, InsufficientRoundsError
from pilotkey.core.models import ChshAngles, ChshEstimate, Outcome, SessionTranscript
from pilotkey.core.types import ORTHOGONAL, AbortReason
from pilotkey.core.utils import bit_from_sign
from pilotkey.protocol.chsh import QUANTUM_BOUND, chsh_estimate


if TYPE_CHECKING:
    import numpy as np

    from pilotkey.core.models import PhysParams, ProtocolRound


logger = logging.getLogger(__name__)


def expected_filter_rate(p: PhysParams, slit: bool = False) -> float:
    """Probability that Bob rejects a pair, |z20| < d/(2K).

    With the entrance slit enforced, z20 is already confined to |z20| <= d/2.
    """
    inner = 2.0 * norm.cdf(p.filter_threshold / p.sigma0) - 1.0
    if not slit:
        return float(inner)
    return float(inner / (2.0 * norm.cdf(p.slit_width / (2.0 * p.sigma0)) - 1.0))


def select_test_subset(
    rounds: list[ProtocolRound], test_fraction: float, rng: np.random.Generator
) -> list[ProtocolRound]:
    """Bob proclaims round(test_fraction * n) surviving rounds; both sides reveal W and s."""
    if not 0.0 < test_fraction < 1.0:
        msg = f"test_fraction must lie in (0, 1), got {test_fraction}"
        raise ValueError(msg)
    eligible = [i for i, r in enumerate(rounds) if not r.filtered_out]
    n_test = round(test_fraction * len(eligible))
    chosen = set(rng.choice(eligible, size=n_test, replace=False).tolist()) if n_test else set()

    announced = list(rounds)
    for i in chosen:
        r = rounds[i]
        if r.outcome is None:
            continue
        announced[i] = r.model_copy(
            update={
                "announced_for_test": True,
                "announced_w_b": r.outcome.w_b,
                "announced_s": r.settings.s,
                "announced_w_a": r.outcome.w_a,
            }
        )
    logger.debug("Announced %d of %d eligible rounds for testing", n_test, len(eligible))
    return announced


def inject_anticorrelation_violation(rounds: list[ProtocolRound]) -> list[ProtocolRound]:
    """Flip W_B of the first aligned test round, as a tampered channel would."""
    for i, r in enumerate(rounds):
        if r.announced_for_test and r.settings.aligned and r.outcome is not None:
            flipped = Outcome(w_a=r.outcome.w_a, w_b=-r.outcome.w_b)
            tampered = list(rounds)
            tampered[i] = r.model_copy(update={"outcome": flipped, "announced_w_b": flipped.w_b})
            logger.warning("Injected anticorrelation violation into round %d", r.index)
            return tampered
    msg = "no aligned test round to tamper with"
    raise InsufficientRoundsError(msg)


def _anticorrelation_holds(r: ProtocolRound) -> bool:
    if r.announced_w_a is None or r.announced_w_b is None or r.announced_s is None:
        return False
    return r.announced_w_b == -r.announced_w_a * r.announced_s


def verify_and_extract(
    rounds: list[ProtocolRound],
    bell_tolerance: float = 0.2,
    angles: ChshAngles | None = None,
    check_bell: bool = True,
) -> SessionTranscript:
    """Abort checks on announced rounds, then the key from the rest.

    Every aligned test round must satisfy W_B = -W_A s; one violation aborts.
    With ``check_bell`` the CHSH value of the orthogonal test rounds is estimated
    per s and compared in magnitude with 2 sqrt(2).

    Raises:
        InsufficientRoundsError: The checks passed but no key rounds remain.
    """
    tests = [r for r in rounds if r.announced_for_test]
    for r in tests:
        if r.settings.aligned and not _anticorrelation_holds(r):
            logger.warning("Anticorrelation violated in test round %d", r.index)
            return SessionTranscript(
                rounds=rounds, aborted=True, abort_reason=AbortReason.ANTICORRELATION_VIOLATION
            )

    estimates: dict[int, ChshEstimate] = {}
    if check_bell:
        for s in (1, -1):
            subset = [r for r in tests if r.settings.delta == ORTHOGONAL and r.settings.s == s]
            estimates[s] = chsh_estimate(subset, angles)
            logger.info(
                "CHSH (s=%+d): %.4f +/- %.4f", s, estimates[s].value, estimates[s].std_error
            )
        if any(abs(e.magnitude - QUANTUM_BOUND) > bell_tolerance for e in estimates.values()):
            return SessionTranscript(
                rounds=rounds,
                aborted=True,
                abort_reason=AbortReason.BELL_VIOLATION,
                chsh_estimates=estimates,
            )

    key_rounds = [r for r in rounds if r.is_key_round]
    if not key_rounds:
        msg = "no aligned rounds left for the key"
        raise InsufficientRoundsError(msg)
    alice = "".join(bit_from_sign(r.outcome.w_a) for r in key_rounds if r.outcome)
    bob = "".join(
        bit_from_sign(-r.outcome.w_b * r.settings.s) for r in key_rounds if r.outcome
    )
    logger.info("Sifted %d key bits", len(alice))
    return SessionTranscript(
        rounds=rounds, alice_key=alice, bob_key=bob, chsh_estimates=estimates
    )


def sift_and_verify(
    rounds: list[ProtocolRound],
    test_fraction: float,
    bell_tolerance: float,
    rng: np.random.Generator,
    angles: ChshAngles | None = None,
    check_bell: bool = True,
) -> SessionTranscript:
    """Announce a test subset, run the abort checks and extract the key."""
    announced = select_test_subset(rounds, test_fraction, rng)
    return verify_and_extract(announced, bell_tolerance, angles, check_bell)


def extract_key(transcript: SessionTranscript) -> tuple[str, str]:
    """(alice_bits, bob_bits) of a delivered session."""
    if transcript.aborted:
        msg = f"session aborted ({transcript.abort_reason.value}); there is no key"
        raise AbortedSessionError(msg)
    return transcript.alice_key, transcript.bob_key


def key_bias(bits: str) -> float:
    """Fraction of ones in a bit string."""
    return bits.count("1") / len(bits) if bits else math.nan
