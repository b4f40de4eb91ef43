"""Fixed-step RK4 integration of the coupled guidance equations."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pilotkey.core.errors import ConfigurationError, IntegrationError
from pilotkey.core.models import TrajectoryPair
from pilotkey.physics.wavefunction import guidance_velocities


if TYPE_CHECKING:
    from pilotkey.core.models import InitialPositions, PhysParams, RoundSettings
    from pilotkey.core.types import ArrayLike, FloatArray


logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-3
DEFAULT_MAX_SAMPLES = 4096


class BatchResult(BaseModel):
    """Final positions of a batch, plus decimated snapshots when requested."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    z1: np.ndarray
    z2: np.ndarray
    times: np.ndarray = Field(default_factory=lambda: np.zeros(0))
    z1_history: np.ndarray = Field(default_factory=lambda: np.zeros((0, 0)))
    z2_history: np.ndarray = Field(default_factory=lambda: np.zeros((0, 0)))


def default_t_end(p: PhysParams, decay: float = 1e-3) -> float:
    """Time at which 1/eps has fallen to ``decay``.

    The guidance term is bounded by a/eps, so past this point it is below
    ``decay`` times its initial coefficient and final sides are settled.
    """
    if not 0.0 < decay < 1.0:
        msg = f"decay must lie in (0, 1), got {decay}"
        raise ConfigurationError(msg)
    return p.spread_time * math.sqrt(1.0 / decay - 1.0)


def step_plan(t_end: float, dt: float) -> tuple[int, float]:
    """Number of uniform steps covering [0, t_end] with step at most dt."""
    if t_end <= 0.0 or dt <= 0.0 or dt > t_end:
        msg = f"need 0 < dt <= t_end, got dt={dt}, t_end={t_end}"
        raise ConfigurationError(msg)
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    return n_steps, t_end / n_steps


def _record_stride(n_steps: int, max_samples: int) -> int:
    if n_steps + 1 <= max_samples:
        return 1
    return math.ceil(n_steps / (max_samples - 2))


def rk4_step(
    z1: FloatArray, z2: FloatArray, t: float, h: float, p: PhysParams, s: ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """One classic Runge-Kutta step advancing both particles together."""
    k1a, k1b = guidance_velocities(z1, z2, t, p, s)
    k2a, k2b = guidance_velocities(z1 + 0.5 * h * k1a, z2 + 0.5 * h * k1b, t + 0.5 * h, p, s)
    k3a, k3b = guidance_velocities(z1 + 0.5 * h * k2a, z2 + 0.5 * h * k2b, t + 0.5 * h, p, s)
    k4a, k4b = guidance_velocities(z1 + h * k3a, z2 + h * k3b, t + h, p, s)
    z1_next = z1 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    z2_next = z2 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return z1_next, z2_next


def integrate_batch(
    z10: ArrayLike,
    z20: ArrayLike,
    s: ArrayLike,
    p: PhysParams,
    t_end: float,
    dt: float = DEFAULT_DT,
    record: bool = False,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> BatchResult:
    """Integrate many pairs at once with the same step sequence.

    Args:
        z10: Alice-particle initial positions.
        z20: Bob-particle initial positions.
        s: Field flip per pair (or one value for all).
        p: Physical parameters.
        t_end: Final time.
        dt: Maximum step; the actual step is t_end / ceil(t_end / dt).
        record: Keep decimated snapshots (at most ``max_samples``, final step included).
        max_samples: Snapshot budget per trajectory.

    Raises:
        IntegrationError: A position became non-finite.
    """
    n_steps, h = step_plan(t_end, dt)
    z1 = np.array(z10, dtype=float, ndmin=1)
    z2 = np.array(z20, dtype=float, ndmin=1)
    s_arr = np.broadcast_to(np.asarray(s), z1.shape)
    stride = _record_stride(n_steps, max_samples)

    times: list[float] = [0.0]
    hist1: list[FloatArray] = [z1.copy()]
    hist2: list[FloatArray] = [z2.copy()]
    logger.debug("RK4: %d pairs, %d steps of %.3g", z1.size, n_steps, h)

    for k in range(n_steps):
        z1, z2 = rk4_step(z1, z2, k * h, h, p, s_arr)
        if not (np.all(np.isfinite(z1)) and np.all(np.isfinite(z2))):
            msg = f"non-finite position after step {k + 1} (t={(k + 1) * h:.6g})"
            raise IntegrationError(msg, step_index=k + 1)
        if record and ((k + 1) % stride == 0 or k + 1 == n_steps):
            times.append((k + 1) * h)
            hist1.append(z1.copy())
            hist2.append(z2.copy())

    if not record:
        return BatchResult(z1=z1, z2=z2)
    return BatchResult(
        z1=z1,
        z2=z2,
        times=np.asarray(times),
        z1_history=np.stack(hist1, axis=1),
        z2_history=np.stack(hist2, axis=1),
    )


def integrate(
    initial: InitialPositions,
    settings: RoundSettings,
    p: PhysParams,
    t_end: float | None = None,
    dt: float = DEFAULT_DT,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> TrajectoryPair:
    """Integrate one pair and return its (decimated) trajectory."""
    if not settings.aligned:
        msg = "trajectories exist only for aligned devices (delta = 0)"
        raise ConfigurationError(msg)
    end = t_end if t_end is not None else default_t_end(p)
    result = integrate_batch(
        initial.z10, initial.z20, settings.s, p, end, dt, record=True, max_samples=max_samples
    )
    return TrajectoryPair(
        times=result.times,
        z1=result.z1_history[0],
        z2=result.z2_history[0],
        settings=settings,
        initial=initial,
        params=p,
    )
