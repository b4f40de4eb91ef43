"""Aggregate accuracy of Eve's guesses over a delivered key."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.stats import binomtest

from pilotkey.adversary.eve import eve_guess_baseline, eve_guess_protocol
from pilotkey.core.errors import AbortedSessionError, InsufficientKeyError
from pilotkey.core.models import AttackReport, EveKnowledge
from pilotkey.core.types import OutcomeMode, ProtocolVariant


if TYPE_CHECKING:
    from pilotkey.core.models import EveStrategy, PhysParams, SessionTranscript


logger = logging.getLogger(__name__)

MIN_KEY_BITS = 100


def key_correlation(guesses: str, key: str) -> float:
    """Pearson r between two equal-length bit strings; 0 when either is constant."""
    g = np.frombuffer(guesses.encode(), dtype=np.uint8).astype(float)
    k = np.frombuffer(key.encode(), dtype=np.uint8).astype(float)
    if g.std() == 0.0 or k.std() == 0.0:
        return 0.0
    return float(np.corrcoef(g, k)[0, 1])


def attack_report(
    session: SessionTranscript,
    variant: ProtocolVariant,
    knows_s: bool = False,
    strategy: EveStrategy | None = None,
    p: PhysParams | None = None,
    confidence_level: float = 0.95,
    mode: OutcomeMode = OutcomeMode.SIGN_LAW,
) -> AttackReport:
    """Eve's accuracy on the session key with an exact (Clopper-Pearson) interval.

    In full_ode sessions the baseline guess uses the conserved sgn(z10 - K z20)
    law, which is what integrated trajectories obey.

    Raises:
        AbortedSessionError: The session delivered no key.
        InsufficientKeyError: Fewer than 100 key bits.
    """
    if session.aborted:
        msg = f"cannot attack an aborted session ({session.abort_reason.value})"
        raise AbortedSessionError(msg)
    key_rounds = session.key_rounds
    if len(key_rounds) < MIN_KEY_BITS:
        msg = f"need at least {MIN_KEY_BITS} key bits, got {len(key_rounds)}"
        raise InsufficientKeyError(msg)

    knowledge = EveKnowledge.observe(session, knows_s=knows_s)
    if variant == ProtocolVariant.BASELINE:
        exact = p if mode == OutcomeMode.FULL_ODE else None
        guesses = "".join(eve_guess_baseline(knowledge, r, exact) for r in key_rounds)
    else:
        guesses = "".join(eve_guess_protocol(knowledge, r, strategy, p) for r in key_rounds)

    key = session.alice_key
    hits = sum(g == b for g, b in zip(guesses, key, strict=True))
    n = len(key)
    ci = binomtest(hits, n).proportion_ci(confidence_level=confidence_level, method="exact")
    logger.info("Eve (%s): %d/%d bits correct", variant.value, hits, n)
    return AttackReport(
        protocol_variant=variant,
        n_key_bits=n,
        eve_accuracy=hits / n,
        binomial_ci=(float(ci.low), float(ci.high)),
        confidence_level=confidence_level,
        key_correlation=key_correlation(guesses, key),
        knows_s=knows_s,
    )
