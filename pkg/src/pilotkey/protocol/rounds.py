"""Round generation: source, Bob's random choices, slit filter and outcomes."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

import numpy as np

from pilotkey.config.settings import IntegratorSettings, ProtocolSettings
from pilotkey.core.errors import ConfigurationError
from pilotkey.core.models import Outcome, ProtocolRound, RoundSettings
from pilotkey.core.types import ALIGNED, ORTHOGONAL, OutcomeMode
from pilotkey.core.utils import fair_sign, round_streams
from pilotkey.protocol.oracle import intercepted_outcomes, singlet_outcomes
from pilotkey.trajectories.integrator import default_t_end, integrate, integrate_batch
from pilotkey.trajectories.outcomes import (
    outcome_measured,
    outcome_predicted,
    outcomes_from_final,
)
from pilotkey.trajectories.sampling import sample_in_slit, sample_initial


if TYPE_CHECKING:
    from pilotkey.core.models import PhysParams


logger = logging.getLogger(__name__)


def check_mode(mode: OutcomeMode, protocol: ProtocolSettings) -> None:
    """Intercept-resend is only modelled by the statistics oracle."""
    if protocol.intercept_fraction > 0.0 and mode != OutcomeMode.QUANTUM_ORACLE:
        msg = f"intercept_fraction > 0 needs mode quantum_oracle, got {mode.value}"
        raise ConfigurationError(msg)


def run_round(
    index: int,
    p: PhysParams,
    master_seed: int,
    mode: OutcomeMode = OutcomeMode.SIGN_LAW,
    protocol: ProtocolSettings | None = None,
    integrator: IntegratorSettings | None = None,
) -> ProtocolRound:
    """Emit, choose, filter and measure one pair.

    Draw order is fixed per stream so serial and concurrent runs agree: the source
    draws the positions, Bob draws s then delta (then his CHSH axis), Alice draws
    her axis, and the oracle stream draws the interception flag before outcomes.

    Raises:
        IntegrationError: In full_ode mode, if the trajectory blows up.
    """
    protocol = protocol or ProtocolSettings()
    integrator = integrator or IntegratorSettings()
    streams = round_streams(master_seed, index, protocol.bob_seed)

    if protocol.enforce_slit:
        initial = sample_in_slit(p, streams.source)
    else:
        initial = sample_initial(p.sigma0, streams.source)

    s = fair_sign(streams.bob)
    delta = ALIGNED if streams.bob.random() < 0.5 else ORTHOGONAL
    if protocol.fixed_s is not None:
        s = protocol.fixed_s
    if protocol.fixed_delta is not None:
        delta = protocol.fixed_delta
    settings = RoundSettings(s=s, delta=delta)

    alice_angle = bob_angle = ALIGNED
    if delta == ORTHOGONAL:
        if mode == OutcomeMode.QUANTUM_ORACLE:
            angles = protocol.chsh_angles
            alice_angle = angles.a if streams.alice.random() < 0.5 else angles.a_prime
            bob_angle = angles.b if streams.bob.random() < 0.5 else angles.b_prime
        else:
            bob_angle = ORTHOGONAL

    intercepted = bool(streams.oracle.random() < protocol.intercept_fraction)
    filtered_out = abs(initial.z20) < p.filter_threshold

    outcome: Outcome | None = None
    if not filtered_out:
        if delta == ORTHOGONAL or mode == OutcomeMode.QUANTUM_ORACLE:
            draw = intercepted_outcomes if intercepted else singlet_outcomes
            outcome = draw(alice_angle, bob_angle, s, streams.oracle)
        elif mode == OutcomeMode.SIGN_LAW:
            outcome = outcome_predicted(initial, s)
        else:
            t_end = integrator.t_end or default_t_end(p, integrator.decay)
            traj = integrate(initial, settings, p, t_end, integrator.dt, integrator.max_samples)
            outcome = outcome_measured(traj, integrator.dead_zone)

    return ProtocolRound(
        index=index,
        initial=initial,
        settings=settings,
        filtered_out=filtered_out,
        outcome=outcome,
        alice_angle=alice_angle,
        bob_angle=bob_angle,
        intercepted=intercepted,
    )


def _resolve_batched(
    rounds: list[ProtocolRound], p: PhysParams, integrator: IntegratorSettings
) -> list[ProtocolRound]:
    """Replace sign-law outcomes of aligned rounds with integrated ones, all pairs at once."""
    targets = [i for i, r in enumerate(rounds) if not r.filtered_out and r.settings.aligned]
    if not targets:
        return rounds
    z10 = np.array([rounds[i].initial.z10 for i in targets])
    z20 = np.array([rounds[i].initial.z20 for i in targets])
    s = np.array([rounds[i].settings.s for i in targets])
    t_end = integrator.t_end or default_t_end(p, integrator.decay)
    logger.info("Integrating %d aligned pairs to t=%.3g", len(targets), t_end)
    result = integrate_batch(z10, z20, s, p, t_end, integrator.dt)
    w_a, w_b = outcomes_from_final(result.z1, result.z2, p.sigma0, integrator.dead_zone)
    resolved = list(rounds)
    for k, i in enumerate(targets):
        outcome = Outcome(w_a=int(w_a[k]), w_b=int(w_b[k]))
        resolved[i] = rounds[i].model_copy(update={"outcome": outcome})
    return resolved


def generate_rounds(
    n: int,
    p: PhysParams,
    master_seed: int,
    mode: OutcomeMode = OutcomeMode.SIGN_LAW,
    protocol: ProtocolSettings | None = None,
    integrator: IntegratorSettings | None = None,
) -> list[ProtocolRound]:
    """Run ``n`` rounds, optionally on a thread pool; output does not depend on ``workers``.

    In full_ode mode the aligned pairs are integrated together in one batch.
    """
    protocol = protocol or ProtocolSettings()
    integrator = integrator or IntegratorSettings()
    check_mode(mode, protocol)
    draw_mode = OutcomeMode.SIGN_LAW if mode == OutcomeMode.FULL_ODE else mode

    def one(index: int) -> ProtocolRound:
        return run_round(index, p, master_seed, draw_mode, protocol, integrator)

    if protocol.workers > 1:
        with ThreadPoolExecutor(max_workers=protocol.workers) as pool:
            rounds = list(pool.map(one, range(n)))
    else:
        rounds = [one(i) for i in range(n)]

    if mode == OutcomeMode.FULL_ODE:
        rounds = _resolve_batched(rounds, p, integrator)
    logger.debug("Generated %d rounds (%s)", n, mode.value)
    return rounds
