"""Tests for the hidden-variable eavesdropper."""

from __future__ import annotations

import pytest

from pilotkey.adversary import (
    attack_report,
    eve_guess_baseline,
    eve_guess_protocol,
    key_correlation,
)
from pilotkey.config.settings import RunConfig, load_config
from pilotkey.core.errors import AbortedSessionError, InsufficientKeyError
from pilotkey.core.models import (
    EveKnowledge,
    EveStrategy,
    InitialPositions,
    Outcome,
    PhysParams,
    ProtocolRound,
    RoundSettings,
    SessionTranscript,
)
from pilotkey.core.types import AbortReason, ProtocolVariant
from pilotkey.orchestrator.pipeline import SessionPipeline, run_attack


@pytest.fixture
def attack_config() -> RunConfig:
    return load_config(overrides={"master_seed": 3, "n_pairs": 10_000})


@pytest.fixture
def session(attack_config: RunConfig) -> SessionTranscript:
    return SessionPipeline(attack_config).run()


class TestKnowledge:
    def test_sees_positions_not_key_settings(self, session: SessionTranscript):
        view = EveKnowledge.observe(session)
        assert len(view.positions) == len(session.rounds)
        key_index = session.key_rounds[0].index
        assert view.s_for(key_index) is None
        test_round = session.test_rounds[0]
        assert view.s_for(test_round.index) == test_round.settings.s

    def test_broken_generator_leaks_s(self, session: SessionTranscript):
        view = EveKnowledge.observe(session, knows_s=True)
        r = session.key_rounds[0]
        assert view.s_for(r.index) == r.settings.s

    def test_hidden_s_requires_flag(self):
        with pytest.raises(ValueError, match="knows_s"):
            EveKnowledge(key_s={0: 1})


class TestGuesses:
    def test_strategy_is_deterministic(self):
        a, b = EveStrategy(seed=4), EveStrategy(seed=4)
        assert [a.s_guess(i) for i in range(50)] == [b.s_guess(i) for i in range(50)]
        assert {a.s_guess(i) for i in range(50)} == {1, -1}

    def test_knowing_s_reveals_every_bit(self, session: SessionTranscript):
        view = EveKnowledge.observe(session, knows_s=True)
        guesses = "".join(eve_guess_protocol(view, r) for r in session.key_rounds)
        assert guesses == session.alice_key

    def test_baseline_rule_on_fixed_s(self, attack_config: RunConfig):
        protocol = attack_config.protocol.model_copy(update={"fixed_s": 1})
        config = attack_config.model_copy(update={"protocol": protocol})
        transcript = SessionPipeline(config).run()
        view = EveKnowledge.observe(transcript)
        guesses = "".join(eve_guess_baseline(view, r) for r in transcript.key_rounds)
        assert guesses == transcript.alice_key

    def test_baseline_exact_law_sees_alice_far_out(self, strong_params: PhysParams):
        view = EveKnowledge(positions={0: InitialPositions(z10=1.5, z20=0.3)})
        r = ProtocolRound(
            index=0,
            initial=InitialPositions(z10=1.5, z20=0.3),
            settings=RoundSettings(s=1),
            filtered_out=False,
            outcome=Outcome(w_a=1, w_b=-1),
        )
        assert eve_guess_baseline(view, r) == "0"
        assert eve_guess_baseline(view, r, strong_params) == "1"

    def test_correlation(self):
        assert key_correlation("0101", "0101") == pytest.approx(1.0)
        assert key_correlation("0101", "1010") == pytest.approx(-1.0)
        assert key_correlation("1111", "0101") == 0.0


class TestAttackReport:
    def test_baseline_is_fully_broken(self, attack_config: RunConfig):
        report = run_attack(attack_config, ProtocolVariant.BASELINE)
        assert report.eve_accuracy == 1.0
        assert report.key_correlation == pytest.approx(1.0)

    def test_baseline_is_broken_under_full_dynamics(self):
        config = load_config(
            overrides={
                "master_seed": 5,
                "n_pairs": 2000,
                "mode": "full_ode",
                "integrator": {"t_end": 10.0, "dt": 1e-2},
            }
        )
        report = run_attack(config, ProtocolVariant.BASELINE)
        assert report.n_key_bits >= 100
        assert report.eve_accuracy >= 0.99

    def test_field_flip_defeats_eve(self, attack_config: RunConfig):
        report = run_attack(attack_config, ProtocolVariant.S_FLIP)
        assert report.n_key_bits > 1000
        low, high = report.binomial_ci
        assert low < 0.5 < high or abs(report.eve_accuracy - 0.5) < 0.04
        assert abs(report.key_correlation) < 0.1

    def test_exact_law_does_not_help(self, attack_config: RunConfig):
        strategy = EveStrategy(use_z10=True, seed=1)
        report = run_attack(attack_config, ProtocolVariant.S_FLIP, strategy=strategy)
        assert abs(report.eve_accuracy - 0.5) < 0.04

    def test_broken_rng_breaks_protocol(self, attack_config: RunConfig):
        report = run_attack(attack_config, ProtocolVariant.S_FLIP, knows_s=True)
        assert report.eve_accuracy == 1.0
        assert report.knows_s

    def test_aborted_session(self):
        aborted = SessionTranscript(aborted=True, abort_reason=AbortReason.BELL_VIOLATION)
        with pytest.raises(AbortedSessionError):
            attack_report(aborted, ProtocolVariant.S_FLIP)

    def test_short_key(self):
        with pytest.raises(InsufficientKeyError):
            attack_report(SessionTranscript(), ProtocolVariant.S_FLIP)

    @pytest.mark.slow
    def test_separation_on_every_seed(self):
        for seed in range(10):
            config = load_config(overrides={"master_seed": seed, "n_pairs": 60_000})
            baseline = run_attack(config, ProtocolVariant.BASELINE)
            flipped = run_attack(config, ProtocolVariant.S_FLIP)
            assert baseline.eve_accuracy == 1.0
            assert flipped.n_key_bits >= 10_000
            assert 0.485 <= flipped.eve_accuracy <= 0.515
            assert baseline.eve_accuracy - flipped.eve_accuracy >= 0.45
