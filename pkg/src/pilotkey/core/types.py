"""Core type definitions and enums."""

from __future__ import annotations

import math
from enum import Enum
from typing import TypeAlias

import numpy as np
from numpy.typing import NDArray


# Type aliases for clarity
JSON: TypeAlias = dict[str, "JSONValue"]
JSONValue: TypeAlias = str | int | float | bool | None | list["JSONValue"] | JSON

FloatArray: TypeAlias = NDArray[np.float64]
ArrayLike: TypeAlias = float | FloatArray
SeedLike: TypeAlias = int | np.random.SeedSequence

ALIGNED = 0.0
ORTHOGONAL = math.pi / 2


class OutcomeMode(str, Enum):
    """How a round's outcome is produced."""

    FULL_ODE = "full_ode"
    SIGN_LAW = "sign_law"
    QUANTUM_ORACLE = "quantum_oracle"


class AbortReason(str, Enum):
    """Why a protocol session was aborted."""

    NONE = "none"
    ANTICORRELATION_VIOLATION = "anticorrelation_violation"
    BELL_VIOLATION = "bell_violation"


class ProtocolVariant(str, Enum):
    """Protocol variants compared by the adversary analysis."""

    BASELINE = "baseline"
    S_FLIP = "s_flip"
