"""Pipeline orchestrator for trajectory runs, protocol sessions and attacks."""

from __future__ import annotations

import logging
import time
from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict, Field

from pilotkey.adversary.report import attack_report
from pilotkey.config.settings import RunConfig
from pilotkey.core.errors import IntegrationError
from pilotkey.core.models import EveStrategy, RoundSettings, TrajectoryPair
from pilotkey.core.types import ALIGNED, OutcomeMode, ProtocolVariant
from pilotkey.core.utils import round_streams, session_stream
from pilotkey.protocol.rounds import check_mode, generate_rounds
from pilotkey.protocol.sifting import (
    inject_anticorrelation_violation,
    select_test_subset,
    verify_and_extract,
)
from pilotkey.trajectories.integrator import default_t_end, integrate
from pilotkey.trajectories.sampling import sample_in_slit, sample_initial


if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from pilotkey.core.models import AttackReport, SessionTranscript

logger = logging.getLogger(__name__)

# Below this many pairs the CHSH noise at the default tolerance aborts honest sessions.
BELL_CHECK_MIN_PAIRS = 40_000


class PairFailure(BaseModel):
    """A trajectory that could not be integrated."""

    model_config = ConfigDict(frozen=True)

    index: int
    s: int
    step_index: int | None = None
    message: str


class TrajectoryRun(BaseModel):
    """Trajectories grouped by pair index, one entry per requested s."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pairs: dict[int, dict[int, TrajectoryPair]] = Field(default_factory=dict)
    failures: list[PairFailure] = Field(default_factory=list)


class SessionPipeline:
    """Orchestrates one key-distribution session."""

    def __init__(self, config: RunConfig | None = None) -> None:
        if config is None:
            config = RunConfig()
        self.config = config

    def run(self, inject_violation: bool = False) -> SessionTranscript:
        """Run the whole session and return its transcript.

        Raises:
            ConfigurationError: Parameters outside the protocol regime or an
                incompatible mode and intercept setting.
            IntegrationError: A full_ode trajectory diverged.
        """
        start_time = time.time()
        cfg = self.config
        protocol = cfg.protocol
        cfg.params.check_protocol_regime()
        check_mode(cfg.mode, protocol)

        logger.info("Stage 1/3: Generating %d rounds (%s)", cfg.n_pairs, cfg.mode.value)
        rounds = generate_rounds(
            cfg.n_pairs, cfg.params, cfg.master_seed, cfg.mode, protocol, cfg.integrator
        )
        logger.info("Bob rejected %d pairs", sum(r.filtered_out for r in rounds))

        logger.info("Stage 2/3: Announcing test subset")
        rng = session_stream(cfg.master_seed, protocol.bob_seed)
        check_bell = cfg.mode == OutcomeMode.QUANTUM_ORACLE
        if check_bell and cfg.n_pairs < BELL_CHECK_MIN_PAIRS:
            logger.warning(
                "Bell check on %d pairs: honest sessions may abort on CHSH noise (use >= %d)",
                cfg.n_pairs,
                BELL_CHECK_MIN_PAIRS,
            )
        announced = select_test_subset(rounds, protocol.test_fraction, rng)
        if inject_violation:
            announced = inject_anticorrelation_violation(announced)

        logger.info("Stage 3/3: Verifying and extracting key")
        transcript = verify_and_extract(
            announced, protocol.bell_tolerance, protocol.chsh_angles, check_bell
        )

        elapsed = time.time() - start_time
        if transcript.aborted:
            logger.warning(
                "Session aborted (%s) after %.2fs", transcript.abort_reason.value, elapsed
            )
        else:
            logger.info(
                "Session complete in %.2fs: %d key bits", elapsed, len(transcript.alice_key)
            )
        return transcript


def run_attack(
    config: RunConfig,
    variant: ProtocolVariant,
    knows_s: bool = False,
    strategy: EveStrategy | None = None,
) -> AttackReport:
    """Run a session under ``variant`` and score Eve's guesses on its key.

    The baseline variant pins s = +1, which is the single-setting scheme the
    s-flip protocol improves on.
    """
    if variant == ProtocolVariant.BASELINE:
        protocol = config.protocol.model_copy(update={"fixed_s": 1})
        config = config.model_copy(update={"protocol": protocol})
    transcript = SessionPipeline(config).run()
    strategy = strategy or EveStrategy(seed=config.master_seed)
    return attack_report(
        transcript, variant, knows_s, strategy, config.params, mode=config.mode
    )


def run_trajectories(
    config: RunConfig,
    s_values: Sequence[int] = (1, -1),
    on_pair: Callable[[int], None] | None = None,
) -> TrajectoryRun:
    """Integrate ``config.n_pairs`` sampled pairs once per value of s.

    Every s sees the same initial positions for a given pair index. A pair that
    fails to integrate is logged and recorded, and the run moves on.
    """
    p = config.params
    integrator = config.integrator
    t_end = integrator.t_end or default_t_end(p, integrator.decay)
    pairs: dict[int, dict[int, TrajectoryPair]] = {}
    failures: list[PairFailure] = []

    logger.info(
        "Integrating %d pairs for s in %s to t=%.3g", config.n_pairs, list(s_values), t_end
    )
    for i in range(config.n_pairs):
        source = round_streams(config.master_seed, i).source
        if config.protocol.enforce_slit:
            initial = sample_in_slit(p, source)
        else:
            initial = sample_initial(p.sigma0, source)
        for s in s_values:
            settings = RoundSettings(s=s, delta=ALIGNED)
            try:
                traj = integrate(
                    initial, settings, p, t_end, integrator.dt, integrator.max_samples
                )
            except IntegrationError as e:
                logger.warning("Pair %d (s=%+d) failed: %s", i, s, e)
                failures.append(
                    PairFailure(index=i, s=s, step_index=e.step_index, message=str(e))
                )
                continue
            pairs.setdefault(i, {})[s] = traj
        if on_pair is not None:
            on_pair(i)

    logger.info("Integrated %d pairs, %d failures", len(pairs), len(failures))
    return TrajectoryRun(pairs=pairs, failures=failures)
