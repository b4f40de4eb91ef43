"""Quantum-equilibrium sampling of initial positions."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from pilotkey.core.errors import ConfigurationError
from pilotkey.core.models import InitialPositions


if TYPE_CHECKING:
    from pilotkey.core.models import PhysParams
    from pilotkey.core.types import FloatArray, SeedLike


logger = logging.getLogger(__name__)

# rejection draws per slit sample before giving up
MAX_SLIT_ATTEMPTS = 100_000


def as_generator(rng_seed: SeedLike | np.random.Generator) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def _check_width(sigma0: float) -> None:
    if sigma0 <= 0.0:
        msg = f"sigma0 must be positive, got {sigma0}"
        raise ConfigurationError(msg)


def sample_initial(sigma0: float, rng_seed: SeedLike | np.random.Generator) -> InitialPositions:
    """Draw (z10, z20) i.i.d. Normal(0, sigma0^2), the t=0 density |psi|^2."""
    _check_width(sigma0)
    z10, z20 = as_generator(rng_seed).normal(0.0, sigma0, size=2)
    return InitialPositions(z10=float(z10), z20=float(z20))


def sample_initial_batch(
    sigma0: float, n: int, rng_seed: SeedLike | np.random.Generator
) -> tuple[FloatArray, FloatArray]:
    """Vectorised ``sample_initial``: n pairs as two arrays."""
    _check_width(sigma0)
    draws = as_generator(rng_seed).normal(0.0, sigma0, size=(n, 2))
    return draws[:, 0].copy(), draws[:, 1].copy()


def sample_in_slit(p: PhysParams, rng_seed: SeedLike | np.random.Generator) -> InitialPositions:
    """Equilibrium sample conditioned on both particles passing slits of width d.

    Filtered pairs then satisfy K |z20| >= d/2 >= |z10|, where the sign
    law coincides with the exact outcome.
    """
    rng = as_generator(rng_seed)
    half = p.slit_width / 2.0
    for _ in range(MAX_SLIT_ATTEMPTS):
        z10, z20 = rng.normal(0.0, p.sigma0, size=2)
        if abs(z10) <= half and abs(z20) <= half:
            return InitialPositions(z10=float(z10), z20=float(z20))
    msg = f"slit width {p.slit_width} admits almost no mass of a sigma0={p.sigma0} packet"
    raise ConfigurationError(msg)
