"""Closed-form post-field singlet wavefunction and its guidance field.

Notation used throughout::

    a   = B mu T / m                        kick velocity
    eps = 1 + hbar^2 t^2 / (4 sigma0^4 m^2)  packet spread factor
    x   = (z1 - s K z2) a t / (sigma0^2 eps) branch argument

rho is a mixture of two Gaussians of width sigma0 sqrt(eps) and the hyperbolic
functions of x can overflow, so densities and currents are formed in the log
domain.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from pilotkey.core.models import SpinorAmplitudes


if TYPE_CHECKING:
    from pilotkey.core.models import PhysParams
    from pilotkey.core.types import ArrayLike, FloatArray


TANH_SATURATION = 30.0
_LN2 = math.log(2.0)


def epsilon(t: ArrayLike, p: PhysParams) -> ArrayLike:
    """Packet spread factor 1 + hbar^2 t^2 / (4 sigma0^4 m^2)."""
    return 1.0 + (p.hbar * np.asarray(t, dtype=float) / (2.0 * p.sigma0**2 * p.mass)) ** 2


def spreading_rate(t: ArrayLike, p: PhysParams) -> ArrayLike:
    """hbar^2 t / (4 m^2 sigma0^4 eps): coefficient of the free-spreading velocity."""
    t = np.asarray(t, dtype=float)
    return p.hbar**2 * t / (4.0 * p.mass**2 * p.sigma0**4 * epsilon(t, p))


def separation_coordinate(z1: ArrayLike, z2: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    """u = z1 - s K z2; its sign is conserved along every trajectory."""
    return np.asarray(z1, dtype=float) - np.asarray(s) * p.bob_scale * np.asarray(z2, dtype=float)


def comoving_coordinate(z1: ArrayLike, z2: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    """w = s K z1 + z2; evolves by pure spreading, w(t) = w(0) sqrt(eps(t))."""
    return np.asarray(s) * p.bob_scale * np.asarray(z1, dtype=float) + np.asarray(z2, dtype=float)


def branch_argument(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike
) -> ArrayLike:
    t = np.asarray(t, dtype=float)
    u = separation_coordinate(z1, z2, p, s)
    return u * p.kick_velocity * t / (p.sigma0**2 * epsilon(t, p))


def packet_centers(
    t: ArrayLike, p: PhysParams, s: int
) -> tuple[tuple[ArrayLike, ArrayLike], tuple[ArrayLike, ArrayLike]]:
    """Centres of the u+v- and u-v+ Gaussians of rho at time t."""
    shift = p.kick_velocity * np.asarray(t, dtype=float)
    bob_shift = s * p.bob_scale * shift
    return (-shift, bob_shift), (shift, -bob_shift)


def _log_envelope(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike
) -> ArrayLike:
    """log of the Gaussian prefactor G shared by rho, j1 and j2."""
    t = np.asarray(t, dtype=float)
    eps = epsilon(t, p)
    width2 = p.sigma0**2 * eps
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    drift2 = (1.0 + (np.asarray(s) * p.bob_scale) ** 2) * (p.kick_velocity * t) ** 2
    return -np.log(2.0 * math.pi * width2) - (z1**2 + z2**2 + drift2) / (2.0 * width2)


def _log_cosh(x: ArrayLike) -> ArrayLike:
    return np.logaddexp(x, -x) - _LN2


def _log_sinh_abs(x: ArrayLike) -> ArrayLike:
    ax = np.abs(x)
    with np.errstate(divide="ignore"):
        return ax + np.log(-np.expm1(-2.0 * ax)) - _LN2


def saturated_tanh(x: ArrayLike) -> ArrayLike:
    """tanh clamped to exactly +/-1 beyond |x| > TANH_SATURATION."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) > TANH_SATURATION, np.sign(x), np.tanh(x))


def _envelope_times_sinh(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike
) -> ArrayLike:
    x = branch_argument(z1, z2, t, p, s)
    return np.sign(x) * np.exp(_log_envelope(z1, z2, t, p, s) + _log_sinh_abs(x))


def density(z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    """rho = G cosh(x).

    At t = 0 this is the product Gaussian exp(-(z1^2 + z2^2) / 2 sigma0^2) / (2 pi sigma0^2).
    """
    x = branch_argument(z1, z2, t, p, s)
    return np.exp(_log_envelope(z1, z2, t, p, s) + _log_cosh(x))


def current1(z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    """j1 = G [(a/eps) sinh x + beta z1 cosh x]."""
    coef = p.kick_velocity / epsilon(t, p)
    rho = density(z1, z2, t, p, s)
    return coef * _envelope_times_sinh(z1, z2, t, p, s) + spreading_rate(t, p) * z1 * rho


def current2(z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    """j2 = G [-(s K a/eps) sinh x + beta z2 cosh x]."""
    coef = -np.asarray(s) * p.bob_scale * p.kick_velocity / epsilon(t, p)
    rho = density(z1, z2, t, p, s)
    return coef * _envelope_times_sinh(z1, z2, t, p, s) + spreading_rate(t, p) * z2 * rho


def reduced_velocity1(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike
) -> ArrayLike:
    """Guidance term (a/eps) tanh(x) of v1, without the spreading part."""
    x = branch_argument(z1, z2, t, p, s)
    return p.kick_velocity / epsilon(t, p) * saturated_tanh(x)


def reduced_velocity2(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike
) -> ArrayLike:
    """Guidance term -(s K a/eps) tanh(x) of v2."""
    x = branch_argument(z1, z2, t, p, s)
    return -np.asarray(s) * p.bob_scale * p.kick_velocity / epsilon(t, p) * saturated_tanh(x)


def guidance_velocities(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """(v1, v2) for both particles in one pass.

    ``s`` may be a scalar or an array broadcastable against the positions, which
    lets a batch of pairs with mixed field flips share a single evaluation.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    s = np.asarray(s)
    eps = epsilon(t, p)
    beta = spreading_rate(t, p)
    guide = p.kick_velocity / eps * saturated_tanh(branch_argument(z1, z2, t, p, s))
    v1 = beta * z1 + guide
    v2 = beta * z2 - s * p.bob_scale * guide
    return v1, v2


def velocity1(z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    return guidance_velocities(z1, z2, t, p, s)[0]


def velocity2(z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: ArrayLike) -> ArrayLike:
    return guidance_velocities(z1, z2, t, p, s)[1]


def wavefunction(
    z1: ArrayLike, z2: ArrayLike, t: ArrayLike, p: PhysParams, s: int
) -> SpinorAmplitudes:
    """Amplitudes of the u+v- and u-v+ components after the field.

    The u-v+ component carries the field phase with +s K B z2, the only choice
    that reproduces the closed-form currents.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    t = np.asarray(t, dtype=float)
    hbar, m, sigma0 = p.hbar, p.mass, p.sigma0
    k = s * p.bob_scale
    eps = epsilon(t, p)
    x = branch_argument(z1, z2, t, p, s)

    log_mag = (
        -np.log(2.0 * sigma0 * np.sqrt(math.pi * eps))
        - (z1**2 + z2**2) / (4.0 * sigma0**2 * eps)
        - (1.0 + k**2) * (p.kick_velocity * t) ** 2 / (4.0 * sigma0**2 * eps)
    )
    kick = p.field_gradient * p.mu * p.field_time
    global_phase = -np.arctan(hbar * t / (2.0 * sigma0**2 * m))
    common = (
        -(1.0 + k**2) * kick**2 * t / (2.0 * hbar * m * eps)
        + hbar * t * (z1**2 + z2**2) / (8.0 * m * sigma0**4 * eps)
    )
    theta = hbar * (z1 - k * z2) * kick * t**2 / (4.0 * m**2 * sigma0**4 * eps)
    field = p.mu * p.field_time / hbar
    phase_pm = global_phase + common + theta - field * (
        p.field_offset * (1.0 - k) + p.field_gradient * (z1 - k * z2)
    )
    phase_mp = global_phase + common - theta - field * (
        p.field_offset * (k - 1.0) - p.field_gradient * (z1 - k * z2)
    )
    c_pm = np.exp(log_mag - x / 2.0 + 1j * phase_pm)
    c_mp = -np.exp(log_mag + x / 2.0 + 1j * phase_mp)
    return SpinorAmplitudes(c_plus_minus=np.asarray(c_pm), c_minus_plus=np.asarray(c_mp))
