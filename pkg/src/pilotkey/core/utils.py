"""Utility functions shared across the simulator."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from pilotkey.core.errors import DegenerateInputError


# spawn_key slots of a round's private streams
SOURCE_STREAM = 0
ALICE_STREAM = 1
BOB_STREAM = 2
ORACLE_STREAM = 3
EVE_STREAM = 4


# round index reserved for session-level draws (test-subset selection)
SESSION_INDEX = 2**32


class RoundStreams(NamedTuple):
    """Independent generators owned by a single protocol round."""

    source: np.random.Generator
    alice: np.random.Generator
    bob: np.random.Generator
    oracle: np.random.Generator


def stream(master_seed: int, index: int, slot: int) -> np.random.Generator:
    """Generator keyed by (master_seed, index, slot); identical in serial and parallel runs."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index, slot)))


def round_streams(master_seed: int, index: int, bob_seed: int | None = None) -> RoundStreams:
    """Build the four per-round streams.

    Bob's stream is drawn from ``bob_seed`` when given, so his choices can be
    decorrelated from the source while keeping the positions fixed.
    """
    bob_entropy = master_seed if bob_seed is None else bob_seed
    return RoundStreams(
        source=stream(master_seed, index, SOURCE_STREAM),
        alice=stream(master_seed, index, ALICE_STREAM),
        bob=stream(bob_entropy, index, BOB_STREAM),
        oracle=stream(master_seed, index, ORACLE_STREAM),
    )


def session_stream(master_seed: int, bob_seed: int | None = None) -> np.random.Generator:
    """Bob's stream for session-level choices such as the test subset."""
    return stream(master_seed if bob_seed is None else bob_seed, SESSION_INDEX, BOB_STREAM)


def strict_sign(value: float) -> int:
    """Sign of a nonzero value as +1 or -1."""
    if value == 0.0:
        msg = "sign of exactly zero is undefined"
        raise DegenerateInputError(msg)
    return 1 if value > 0.0 else -1


def fair_sign(rng: np.random.Generator) -> int:
    return 1 if rng.random() < 0.5 else -1


def bit_from_sign(value: int) -> str:
    """Key-bit mapping: +1 -> "1", -1 -> "0"."""
    return "1" if value > 0 else "0"
