"""Numerical oracles cross-checking the closed forms and the integrator.

Every check returns a CheckReport; a failing check is data, not an exception.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial.legendre import leggauss

from pilotkey.core.models import CheckReport, GridSpec
from pilotkey.physics.wavefunction import (
    comoving_coordinate,
    current1,
    current2,
    density,
    epsilon,
    guidance_velocities,
    spreading_rate,
    wavefunction,
)
from pilotkey.trajectories.integrator import integrate_batch
from pilotkey.trajectories.sampling import sample_initial_batch


if TYPE_CHECKING:
    from pilotkey.core.models import PhysParams, RoundSettings
    from pilotkey.core.types import FloatArray


logger = logging.getLogger(__name__)

DENSITY_FLOOR = 1e-300
RELATIVE_FLOOR = 1e-12
RICHARDSON_BAND = (3.5, 4.5)
RK4_ORDER_BAND = (8.0, 32.0)


def _current_scales(
    z1: FloatArray, z2: FloatArray, t: float, p: PhysParams, s: int, rho: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """Magnitude each current would have without cancellation between its two terms."""
    beta = spreading_rate(t, p)
    coef = p.kick_velocity / epsilon(t, p)
    return (
        rho * (np.abs(beta * z1) + coef),
        rho * (np.abs(beta * z2) + p.bob_scale * coef),
    )


def check_density_oracle(
    grid: GridSpec, p: PhysParams, s: int, tolerance: float = 1e-10
) -> CheckReport:
    """|c+-|^2 + |c-+|^2 from the spinor against the closed-form rho."""
    z1, z2 = grid.mesh()
    max_abs = max_rel = 0.0
    for t in grid.times:
        rho = density(z1, z2, t, p, s)
        from_psi = wavefunction(z1, z2, t, p, s).density
        mask = rho > DENSITY_FLOOR
        err = np.abs(from_psi - rho)[mask]
        if err.size:
            max_abs = max(max_abs, float(err.max()))
            max_rel = max(max_rel, float((err / rho[mask]).max()))
    return CheckReport(
        check_name="density_oracle",
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        passed=max_rel <= tolerance,
        tolerance=tolerance,
        details={"s": float(s)},
    )


def check_current_consistency(
    grid: GridSpec,
    p: PhysParams,
    s: int,
    tolerance: float = 1e-10,
    fuzz_points: int = 0,
    seed: int = 0,
) -> CheckReport:
    """j_a against rho v_a on the grid, plus optional random (z1, z2, t) probes."""
    z1, z2 = grid.mesh()
    probes: list[tuple[FloatArray, FloatArray, FloatArray]] = [
        (z1, z2, np.full_like(z1, t)) for t in grid.times
    ]
    if fuzz_points:
        rng = np.random.default_rng(seed)
        probes.append(
            (
                rng.uniform(grid.z_min, grid.z_max, fuzz_points),
                rng.uniform(grid.z_min, grid.z_max, fuzz_points),
                rng.uniform(0.0, max(grid.times), fuzz_points),
            )
        )

    max_abs = max_rel = 0.0
    for a, b, t in probes:
        rho = density(a, b, t, p, s)
        v1, v2 = guidance_velocities(a, b, t, p, s)
        j1 = current1(a, b, t, p, s)
        j2 = current2(a, b, t, p, s)
        mask = rho > RELATIVE_FLOOR * rho.max()
        scale1, scale2 = _current_scales(a, b, t, p, s, rho)
        err1 = np.abs(j1 - rho * v1)[mask]
        err2 = np.abs(j2 - rho * v2)[mask]
        if not err1.size:
            continue
        max_abs = max(max_abs, float(err1.max()), float(err2.max()))
        max_rel = max(
            max_rel,
            float((err1 / scale1[mask]).max()),
            float((err2 / scale2[mask]).max()),
        )
    return CheckReport(
        check_name="current_consistency",
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        passed=max_rel <= tolerance,
        tolerance=tolerance,
        details={"s": float(s), "fuzz_points": float(fuzz_points)},
    )


def _continuity_residual(
    z1: FloatArray, z2: FloatArray, t: float, p: PhysParams, s: int, h: float
) -> tuple[float, float]:
    """(max |residual|, max size of the largest term) with central differences of step h."""
    drho_dt = (density(z1, z2, t + h, p, s) - density(z1, z2, t - h, p, s)) / (2.0 * h)
    dj1 = (current1(z1 + h, z2, t, p, s) - current1(z1 - h, z2, t, p, s)) / (2.0 * h)
    dj2 = (current2(z1, z2 + h, t, p, s) - current2(z1, z2 - h, t, p, s)) / (2.0 * h)
    residual = np.abs(drho_dt + dj1 + dj2)
    scale = np.maximum(np.abs(drho_dt), np.maximum(np.abs(dj1), np.abs(dj2)))
    return float(residual.max()), float(scale.max())


def check_continuity(
    grid: GridSpec, p: PhysParams, s: int, h: float = 1e-3, tolerance: float = 1e-3
) -> CheckReport:
    """Discrete continuity equation at interior nodes, with a step-halving order test.

    d rho/dt comes from differencing rho in t, not from an analytic derivative.
    Passes when the residual relative to the largest term is within tolerance and
    halving h shrinks it by a factor in [3.5, 4.5]. Slices where the residual is
    exactly zero (t = 0) need no ratio.
    """
    z1, z2 = grid.mesh()
    z1, z2 = z1[1:-1, 1:-1], z2[1:-1, 1:-1]
    coarse = fine = scale = 0.0
    for t in grid.times:
        r_h, sc = _continuity_residual(z1, z2, t, p, s, h)
        r_half, _ = _continuity_residual(z1, z2, t, p, s, h / 2.0)
        coarse = max(coarse, r_h)
        fine = max(fine, r_half)
        scale = max(scale, sc)

    rel = coarse / scale if scale > 0.0 else 0.0
    if coarse == 0.0:
        ratio = float("nan")
        converges = True
    else:
        ratio = coarse / fine if fine > 0.0 else math.inf
        converges = RICHARDSON_BAND[0] <= ratio <= RICHARDSON_BAND[1]
    logger.debug("continuity: residual %.3e, ratio %.3f", coarse, ratio)
    return CheckReport(
        check_name="continuity",
        max_abs_error=coarse,
        max_rel_error=rel,
        passed=converges and rel <= tolerance,
        tolerance=tolerance,
        details={"s": float(s), "h": h, "richardson_ratio": ratio, "residual_half_h": fine},
    )


def _bin_masses(
    edges1: FloatArray, edges2: FloatArray, t: float, p: PhysParams, s: int
) -> FloatArray:
    """Integral of rho over every histogram bin with a 5x5 Gauss-Legendre rule."""
    nodes, weights = leggauss(5)
    mid1, half1 = (edges1[1:] + edges1[:-1]) / 2.0, (edges1[1:] - edges1[:-1]) / 2.0
    mid2, half2 = (edges2[1:] + edges2[:-1]) / 2.0, (edges2[1:] - edges2[:-1]) / 2.0
    q1 = mid1[:, None] + half1[:, None] * nodes[None, :]
    q2 = mid2[:, None] + half2[:, None] * nodes[None, :]
    # (bin1, node1, bin2, node2)
    rho = density(q1[:, :, None, None], q2[None, None, :, :], t, p, s)
    w = np.einsum("jl,ajbl->ab", weights[:, None] * weights[None, :], rho)
    return w * half1[:, None] * half2[None, :]


def check_equivariance(
    n_samples: int,
    t_probe: float,
    p: PhysParams,
    settings: RoundSettings,
    seed: int = 0,
    n_bins: int = 50,
    dt: float = 1e-3,
    tolerance: float = 0.05,
) -> CheckReport:
    """Total-variation distance between a transported ensemble and rho(t_probe).

    The box covers both packets out to five widths; mass outside it enters the
    distance as one extra bin.
    """
    s = settings.s
    z10, z20 = sample_initial_batch(p.sigma0, n_samples, seed)
    if t_probe > 0.0:
        result = integrate_batch(z10, z20, s, p, t_probe, min(dt, t_probe))
        z1, z2 = result.z1, result.z2
    else:
        z1, z2 = z10, z20

    width = 5.0 * p.sigma0 * math.sqrt(float(epsilon(t_probe, p)))
    shift = p.kick_velocity * t_probe
    edges1 = np.linspace(-(shift + width), shift + width, n_bins + 1)
    edges2 = np.linspace(-(p.bob_scale * shift + width), p.bob_scale * shift + width, n_bins + 1)

    counts, _, _ = np.histogram2d(z1, z2, bins=(edges1, edges2))
    empirical = counts / n_samples
    expected = _bin_masses(edges1, edges2, t_probe, p, s)
    outside = abs((1.0 - empirical.sum()) - (1.0 - expected.sum()))
    tv = 0.5 * (float(np.abs(empirical - expected).sum()) + outside)
    return CheckReport(
        check_name="equivariance",
        max_abs_error=tv,
        max_rel_error=tv,
        passed=tv <= tolerance,
        tolerance=tolerance,
        details={
            "s": float(s),
            "n_samples": float(n_samples),
            "t_probe": t_probe,
            "n_bins": float(n_bins),
            "expected_mass_in_box": float(expected.sum()),
        },
    )


def normalization(p: PhysParams, s: int, t: float, nodes_per_tile: int = 8) -> float:
    """Integral of rho over a box holding both drifting packets.

    Composite Gauss-Legendre on tiles one packet-width wide; adaptive schemes
    miss narrow packets far from the origin.
    """
    sigma_eff = p.sigma0 * math.sqrt(float(epsilon(t, p)))
    half = max(p.bob_scale, 1.0) * p.kick_velocity * t + 10.0 * sigma_eff
    n_tiles = max(1, math.ceil(2.0 * half / sigma_eff))
    edges = np.linspace(-half, half, n_tiles + 1)
    nodes, weights = leggauss(nodes_per_tile)
    mid, h = (edges[1:] + edges[:-1]) / 2.0, (edges[1:] - edges[:-1]) / 2.0
    pts = (mid[:, None] + h[:, None] * nodes[None, :]).ravel()
    wts = (h[:, None] * weights[None, :]).ravel()
    rho = density(pts[:, None], pts[None, :], t, p, s)
    return float(wts @ rho @ wts)


def check_normalization(
    p: PhysParams, s: int, times: list[float], tolerance: float = 1e-6
) -> CheckReport:
    errors = [abs(normalization(p, s, t) - 1.0) for t in times]
    worst = max(errors) if errors else 0.0
    return CheckReport(
        check_name="normalization",
        max_abs_error=worst,
        max_rel_error=worst,
        passed=worst <= tolerance,
        tolerance=tolerance,
        details={"s": float(s), **{f"t={t:g}": e for t, e in zip(times, errors, strict=True)}},
    )


def check_wavefunction_current(
    grid: GridSpec, p: PhysParams, s: int, h: float = 1e-5, tolerance: float = 1e-6
) -> CheckReport:
    """Currents (hbar/m) Im(psi^dagger d psi) from the spinor against the closed forms."""
    z1, z2 = grid.mesh()
    max_abs = max_rel = 0.0
    for t in grid.times:
        psi = wavefunction(z1, z2, t, p, s)
        fwd1, bwd1 = wavefunction(z1 + h, z2, t, p, s), wavefunction(z1 - h, z2, t, p, s)
        fwd2, bwd2 = wavefunction(z1, z2 + h, t, p, s), wavefunction(z1, z2 - h, t, p, s)
        j_num = []
        for fwd, bwd in ((fwd1, bwd1), (fwd2, bwd2)):
            d_pm = (fwd.c_plus_minus - bwd.c_plus_minus) / (2.0 * h)
            d_mp = (fwd.c_minus_plus - bwd.c_minus_plus) / (2.0 * h)
            im = np.imag(np.conj(psi.c_plus_minus) * d_pm + np.conj(psi.c_minus_plus) * d_mp)
            j_num.append(p.hbar / p.mass * im)

        rho = density(z1, z2, t, p, s)
        mask = rho > RELATIVE_FLOOR * rho.max()
        scales = _current_scales(z1, z2, t, p, s, rho)
        for numeric, exact, scale in zip(
            j_num, (current1(z1, z2, t, p, s), current2(z1, z2, t, p, s)), scales, strict=True
        ):
            err = np.abs(numeric - exact)[mask]
            max_abs = max(max_abs, float(err.max()))
            max_rel = max(max_rel, float((err / scale[mask]).max()))
    return CheckReport(
        check_name="wavefunction_current",
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        passed=max_rel <= tolerance,
        tolerance=tolerance,
        details={"s": float(s), "h": h},
    )


def check_integrator_order(
    p: PhysParams,
    n_initial: int = 10,
    seed: int = 0,
    t_end: float = 1.0,
    dt: float = 1e-2,
    s: int = 1,
) -> CheckReport:
    """Step-halving convergence of RK4 on random equilibrium samples.

    The ratio of successive final-position differences should be near 2^4 = 16.
    The comoving coordinate, which has the exact solution w0 sqrt(eps), is
    reported alongside.
    """
    z10, z20 = sample_initial_batch(p.sigma0, n_initial, seed)
    finals = []
    for step in (dt, dt / 2.0, dt / 4.0):
        r = integrate_batch(z10, z20, s, p, t_end, step)
        finals.append((r.z1, r.z2))

    def gap(a: tuple[FloatArray, FloatArray], b: tuple[FloatArray, FloatArray]) -> float:
        return float(max(np.abs(a[0] - b[0]).max(), np.abs(a[1] - b[1]).max()))

    d1, d2 = gap(finals[0], finals[1]), gap(finals[1], finals[2])
    ratio = d1 / d2 if d2 > 0.0 else math.inf
    w_exact = comoving_coordinate(z10, z20, p, s) * math.sqrt(float(epsilon(t_end, p)))
    w_num = comoving_coordinate(finals[2][0], finals[2][1], p, s)
    w_err = float(np.max(np.abs(w_num - w_exact) / np.maximum(np.abs(w_exact), p.sigma0)))
    return CheckReport(
        check_name="integrator_order",
        max_abs_error=d2,
        max_rel_error=w_err,
        passed=RK4_ORDER_BAND[0] <= ratio <= RK4_ORDER_BAND[1],
        tolerance=RK4_ORDER_BAND[1],
        details={"ratio": ratio, "gap_dt": d1, "gap_half_dt": d2, "comoving_rel_error": w_err},
    )
