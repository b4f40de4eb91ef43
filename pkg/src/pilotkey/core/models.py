"""Data models for the double Stern-Gerlach simulator and key-distribution protocol."""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from pilotkey.core.errors import ConfigurationError
from pilotkey.core.types import ALIGNED, ORTHOGONAL, AbortReason, ProtocolVariant
from pilotkey.core.utils import EVE_STREAM, fair_sign, stream


def _check_sign(value: int) -> int:
    if value not in (1, -1):
        msg = f"sign must be +1 or -1, got {value}"
        raise ValueError(msg)
    return value


class PhysParams(BaseModel):
    """Physical constants and device geometry of the double Stern-Gerlach setup.

    Alice's field is B0 + B z, Bob's is s K (B0 + B z). Defaults are natural units
    with a strong gradient (kick velocity B mu T / m = 10).
    """

    model_config = ConfigDict(frozen=True)

    hbar: float = Field(default=1.0, gt=0.0)
    mass: float = Field(default=1.0, gt=0.0)
    mu: float = Field(default=1.0, gt=0.0)
    field_offset: float = 0.0
    field_gradient: float = Field(default=10.0, ge=0.0)
    bob_scale: float = Field(default=2.0, gt=0.0)
    field_time: float = Field(default=1.0, gt=0.0)
    sigma0: float = Field(default=1.0, gt=0.0)
    slit_width: float = Field(default=1.0, gt=0.0)

    @property
    def kick_velocity(self) -> float:
        """B mu T / m, the velocity each branch acquires in the field."""
        return self.field_gradient * self.mu * self.field_time / self.mass

    @property
    def spread_time(self) -> float:
        """2 m sigma0^2 / hbar, the free-spreading time scale."""
        return 2.0 * self.mass * self.sigma0**2 / self.hbar

    @property
    def filter_threshold(self) -> float:
        """Bob's rejection radius d / (2K)."""
        return self.slit_width / (2.0 * self.bob_scale)

    def check_protocol_regime(self) -> None:
        """Raise unless B > 0 and K > 1, the regime the protocol's sign laws assume."""
        if self.field_gradient <= 0.0 or self.bob_scale <= 1.0:
            msg = (
                "protocol requires field_gradient > 0 and bob_scale > 1, got "
                f"B={self.field_gradient}, K={self.bob_scale}"
            )
            raise ConfigurationError(msg)


class RoundSettings(BaseModel):
    """Bob's per-round random choices: field flip s and device alignment delta."""

    model_config = ConfigDict(frozen=True)

    s: int
    delta: float = ALIGNED

    @field_validator("s")
    @classmethod
    def _valid_sign(cls, v: int) -> int:
        return _check_sign(v)

    @field_validator("delta")
    @classmethod
    def _valid_delta(cls, v: float) -> float:
        if v not in (ALIGNED, ORTHOGONAL):
            msg = f"delta must be 0 or pi/2, got {v}"
            raise ValueError(msg)
        return v

    @property
    def aligned(self) -> bool:
        return self.delta == ALIGNED


class SpinorAmplitudes(BaseModel):
    """Amplitudes of the u+v- and u-v+ components; u+v+ and u-v- vanish identically."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c_plus_minus: np.ndarray
    c_minus_plus: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.c_plus_minus) ** 2 + np.abs(self.c_minus_plus) ** 2


class InitialPositions(BaseModel):
    """Hidden variables of one pair at the field exit."""

    model_config = ConfigDict(frozen=True)

    z10: float
    z20: float


class TrajectoryPair(BaseModel):
    """Time series of both particles' z coordinates under the guidance law."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    settings: RoundSettings
    initial: InitialPositions
    params: PhysParams

    @model_validator(mode="after")
    def _consistent(self) -> TrajectoryPair:
        if not (len(self.times) == len(self.z1) == len(self.z2)):
            msg = "times, z1 and z2 must have equal length"
            raise ValueError(msg)
        if len(self.times) == 0 or self.times[0] != 0.0:
            msg = "times must start at 0"
            raise ValueError(msg)
        if np.any(np.diff(self.times) <= 0.0):
            msg = "times must be strictly increasing"
            raise ValueError(msg)
        if self.z1[0] != self.initial.z10 or self.z2[0] != self.initial.z20:
            msg = "trajectory must start at the initial positions"
            raise ValueError(msg)
        return self

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


class Outcome(BaseModel):
    """Which side of the xy plane each particle reaches."""

    model_config = ConfigDict(frozen=True)

    w_a: int
    w_b: int

    @field_validator("w_a", "w_b")
    @classmethod
    def _valid_sign(cls, v: int) -> int:
        return _check_sign(v)


class ChshAngles(BaseModel):
    """Measurement axes for the CHSH combination E(a,b) - E(a,b') + E(a',b) + E(a',b')."""

    model_config = ConfigDict(frozen=True)

    a: float = 0.0
    a_prime: float = math.pi / 2
    b: float = math.pi / 4
    b_prime: float = 3 * math.pi / 4

    def terms(self) -> list[tuple[str, float, float, int]]:
        """(label, alice angle, bob angle, sign) for the four correlation terms."""
        return [
            ("a,b", self.a, self.b, 1),
            ("a,b'", self.a, self.b_prime, -1),
            ("a',b", self.a_prime, self.b, 1),
            ("a',b'", self.a_prime, self.b_prime, 1),
        ]


class ChshEstimate(BaseModel):
    """Empirical CHSH value with its standard error."""

    model_config = ConfigDict(frozen=True)

    value: float
    std_error: float
    correlations: dict[str, float] = Field(default_factory=dict)
    counts: dict[str, int] = Field(default_factory=dict)

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def deviation(self, target: float = 2 * math.sqrt(2)) -> float:
        return abs(self.magnitude - target)


class ProtocolRound(BaseModel):
    """One pair's lifecycle: hidden positions, Bob's choices, outcomes, announcements.

    Invariants:
        - outcome is present exactly when the round survived the slit filter
        - Alice only announces W_A in response to an announced W_B
    """

    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    initial: InitialPositions
    settings: RoundSettings
    filtered_out: bool
    outcome: Outcome | None = None
    alice_angle: float = ALIGNED
    bob_angle: float = ALIGNED
    intercepted: bool = False
    announced_for_test: bool = False
    announced_w_b: int | None = None
    announced_s: int | None = None
    announced_w_a: int | None = None

    @model_validator(mode="after")
    def _invariants(self) -> ProtocolRound:
        if self.filtered_out == (self.outcome is not None):
            msg = f"round {self.index}: outcome must be present iff not filtered out"
            raise ValueError(msg)
        if self.announced_w_a is not None and self.announced_w_b is None:
            msg = f"round {self.index}: W_A announced without W_B"
            raise ValueError(msg)
        return self

    @property
    def is_key_round(self) -> bool:
        return not self.filtered_out and self.settings.aligned and not self.announced_for_test

    def public_record(self) -> dict[str, Any]:
        """Fields visible on the classical channel."""
        return {
            "index": self.index,
            "filtered_out": self.filtered_out,
            "delta": self.settings.delta,
            "alice_angle": self.alice_angle,
            "bob_angle": self.bob_angle,
            "announced_for_test": self.announced_for_test,
            "announced_w_b": self.announced_w_b,
            "announced_s": self.announced_s,
            "announced_w_a": self.announced_w_a,
        }

    def full_record(self) -> dict[str, Any]:
        """Public fields plus hidden variables and private outcomes."""
        return {
            **self.public_record(),
            "z10": self.initial.z10,
            "z20": self.initial.z20,
            "s": self.settings.s,
            "w_a": self.outcome.w_a if self.outcome else None,
            "w_b": self.outcome.w_b if self.outcome else None,
            "intercepted": self.intercepted,
        }


class SessionTranscript(BaseModel):
    """Public record of a protocol run plus sifted keys and abort status."""

    model_config = ConfigDict(frozen=True)

    rounds: list[ProtocolRound] = Field(default_factory=list)
    alice_key: str = ""
    bob_key: str = ""
    aborted: bool = False
    abort_reason: AbortReason = AbortReason.NONE
    chsh_estimates: dict[int, ChshEstimate] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _abort_clears_keys(self) -> SessionTranscript:
        if self.aborted and (self.alice_key or self.bob_key):
            msg = "an aborted session cannot carry key bits"
            raise ValueError(msg)
        if not self.aborted and self.alice_key != self.bob_key:
            msg = "a completed session must deliver identical keys to Alice and Bob"
            raise ValueError(msg)
        if self.aborted == (self.abort_reason == AbortReason.NONE):
            msg = "abort_reason must be set exactly when the session is aborted"
            raise ValueError(msg)
        return self

    @property
    def key_rounds(self) -> list[ProtocolRound]:
        return [r for r in self.rounds if r.is_key_round]

    @property
    def test_rounds(self) -> list[ProtocolRound]:
        return [r for r in self.rounds if r.announced_for_test]

    def summary(self) -> dict[str, Any]:
        filtered = sum(r.filtered_out for r in self.rounds)
        return {
            "n_rounds": len(self.rounds),
            "n_filtered": filtered,
            "n_test": len(self.test_rounds),
            "key_length": len(self.alice_key),
            "aborted": self.aborted,
            "abort_reason": self.abort_reason.value,
            "alice_key": self.alice_key,
            "bob_key": self.bob_key,
            "chsh": {
                str(s): est.model_dump() for s, est in sorted(self.chsh_estimates.items())
            },
        }


class GridSpec(BaseModel):
    """Square evaluation grid and probe times for the numerical oracles."""

    model_config = ConfigDict(frozen=True)

    z_min: float
    z_max: float
    n_points: int = Field(default=101, ge=3)
    times: list[float] = Field(default_factory=lambda: [0.0, 0.5, 2.0])

    @model_validator(mode="after")
    def _ordered(self) -> GridSpec:
        if self.z_min >= self.z_max:
            msg = f"z_min must be below z_max, got [{self.z_min}, {self.z_max}]"
            raise ValueError(msg)
        return self

    @classmethod
    def default(
        cls, params: PhysParams, times: list[float] | None = None, n_points: int = 101
    ) -> GridSpec:
        """[-L, L] with L = 6 sigma_eff(t_max) + K a t_max, following the drifting packets."""
        probe = times if times is not None else [0.0, 0.5, 2.0]
        t_max = max(probe)
        eps = 1.0 + (t_max / params.spread_time) ** 2
        half = 6.0 * params.sigma0 * math.sqrt(eps)
        half += max(params.bob_scale, 1.0) * params.kick_velocity * t_max
        return cls(z_min=-half, z_max=half, n_points=n_points, times=probe)

    def axis(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n_points)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        z = self.axis()
        return np.meshgrid(z, z, indexing="ij")


class CheckReport(BaseModel):
    """Outcome of one numerical oracle."""

    check_name: str
    max_abs_error: float
    max_rel_error: float
    passed: bool
    tolerance: float
    details: dict[str, float] = Field(default_factory=dict)


class EveKnowledge(BaseModel):
    """What a Bohmian eavesdropper knows: every hidden position plus the public record."""

    model_config = ConfigDict(frozen=True)

    positions: dict[int, InitialPositions] = Field(default_factory=dict)
    deltas: dict[int, float] = Field(default_factory=dict)
    test_indices: frozenset[int] = frozenset()
    announced_s: dict[int, int] = Field(default_factory=dict)
    knows_s: bool = False
    key_s: dict[int, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _s_hidden(self) -> EveKnowledge:
        if not self.knows_s and self.key_s:
            msg = "s of key rounds is only visible with a broken RNG (knows_s)"
            raise ValueError(msg)
        return self

    def s_for(self, index: int) -> int | None:
        """s of a round if Eve has seen it, else None."""
        if index in self.announced_s:
            return self.announced_s[index]
        return self.key_s.get(index)

    @classmethod
    def observe(cls, transcript: SessionTranscript, knows_s: bool = False) -> EveKnowledge:
        """Eve's view of a finished session.

        She holds every hidden position and every public announcement. The s of
        key rounds is added only when Bob's generator is compromised.
        """
        key_s = {r.index: r.settings.s for r in transcript.key_rounds} if knows_s else {}
        return cls(
            positions={r.index: r.initial for r in transcript.rounds},
            deltas={r.index: r.settings.delta for r in transcript.rounds},
            test_indices=frozenset(r.index for r in transcript.test_rounds),
            announced_s={
                r.index: r.announced_s for r in transcript.rounds if r.announced_s is not None
            },
            knows_s=knows_s,
            key_s=key_s,
        )


class EveStrategy(BaseModel):
    """Deterministic guessing rule for an unknown s.

    ``s_guess`` is a fair sign drawn from a stream keyed by (seed, round index).
    With ``use_z10`` Eve applies the exact sgn(z10 - s K z20) law instead of the
    z20-only sign law.
    """

    model_config = ConfigDict(frozen=True)

    use_z10: bool = False
    seed: int = 0

    def s_guess(self, index: int) -> int:
        return fair_sign(stream(self.seed, index, EVE_STREAM))


class AttackReport(BaseModel):
    """Eve's aggregate key-guessing accuracy."""

    protocol_variant: ProtocolVariant
    n_key_bits: int
    eve_accuracy: float = Field(ge=0.0, le=1.0)
    binomial_ci: tuple[float, float]
    confidence_level: float = 0.95
    key_correlation: float = 0.0
    knows_s: bool = False
