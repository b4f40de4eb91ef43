"""Tests for round generation, the statistics oracle, sifting and CHSH."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from pilotkey.adversary import key_correlation
from pilotkey.config.settings import ProtocolSettings, RunConfig, load_config
from pilotkey.core.errors import (
    AbortedSessionError,
    ConfigurationError,
    InsufficientRoundsError,
    InsufficientStatisticsError,
)
from pilotkey.core.models import (
    ChshAngles,
    InitialPositions,
    Outcome,
    PhysParams,
    ProtocolRound,
    RoundSettings,
    SessionTranscript,
)
from pilotkey.core.types import ORTHOGONAL, AbortReason, OutcomeMode
from pilotkey.core.utils import bit_from_sign
from pilotkey.orchestrator.pipeline import BELL_CHECK_MIN_PAIRS, SessionPipeline
from pilotkey.protocol import (
    QUANTUM_BOUND,
    check_mode,
    chsh_estimate,
    expected_filter_rate,
    extract_key,
    generate_rounds,
    inject_anticorrelation_violation,
    intercepted_outcomes,
    key_bias,
    run_round,
    select_test_subset,
    sift_and_verify,
    simulate_bell_rounds,
    singlet_outcomes,
    verify_and_extract,
)


def _session(**overrides) -> RunConfig:
    return load_config(overrides={"master_seed": 1, "n_pairs": 10_000, **overrides})


def _round(index: int, z20: float, s: int = 1, **kwargs) -> ProtocolRound:
    initial = InitialPositions(z10=0.0, z20=z20)
    return ProtocolRound(
        index=index,
        initial=initial,
        settings=RoundSettings(s=s),
        filtered_out=False,
        outcome=Outcome(w_a=-s if z20 > 0 else s, w_b=1 if z20 > 0 else -1),
        **kwargs,
    )


class TestRoundModel:
    def test_outcome_required_when_kept(self):
        with pytest.raises(ValidationError, match="outcome must be present"):
            ProtocolRound(
                index=0,
                initial=InitialPositions(z10=0.0, z20=1.0),
                settings=RoundSettings(s=1),
                filtered_out=False,
            )

    def test_alice_answers_bob(self):
        with pytest.raises(ValidationError, match="without W_B"):
            _round(0, 0.5, announced_w_a=1)

    def test_abort_carries_no_key(self):
        with pytest.raises(ValidationError):
            SessionTranscript(
                alice_key="01",
                bob_key="01",
                aborted=True,
                abort_reason=AbortReason.BELL_VIOLATION,
            )

    def test_completed_session_keys_match(self):
        with pytest.raises(ValidationError, match="identical keys"):
            SessionTranscript(alice_key="0110", bob_key="0111")

    def test_public_record_hides_positions(self):
        record = _round(3, 0.5).public_record()
        assert "z20" not in record
        assert "s" not in record
        assert record["announced_s"] is None


class TestRounds:
    def test_round_is_reproducible(self, strong_params: PhysParams):
        assert run_round(17, strong_params, 5) == run_round(17, strong_params, 5)

    def test_workers_do_not_change_output(self, strong_params: PhysParams):
        serial = generate_rounds(300, strong_params, 9)
        threaded = generate_rounds(300, strong_params, 9, protocol=ProtocolSettings(workers=4))
        assert serial == threaded

    def test_bob_seed_keeps_positions(self, strong_params: PhysParams):
        a = generate_rounds(50, strong_params, 9)
        b = generate_rounds(50, strong_params, 9, protocol=ProtocolSettings(bob_seed=123))
        assert [r.initial for r in a] == [r.initial for r in b]
        assert [r.settings for r in a] != [r.settings for r in b]

    def test_key_comes_from_late_choice(self, strong_params: PhysParams):
        n = 20_000
        a = generate_rounds(n, strong_params, 9)
        b = generate_rounds(n, strong_params, 9, protocol=ProtocolSettings(bob_seed=123))
        both = [
            (x.outcome.w_a, y.outcome.w_a)
            for x, y in zip(a, b, strict=True)
            if x.outcome and y.outcome and x.settings.aligned and y.settings.aligned
        ]
        first = "".join(bit_from_sign(w) for w, _ in both)
        second = "".join(bit_from_sign(w) for _, w in both)
        assert len(both) > 3000
        assert abs(key_correlation(first, second)) < 3 / math.sqrt(len(both))

    def test_filter_radius(self, strong_params: PhysParams):
        for r in generate_rounds(500, strong_params, 2):
            assert r.filtered_out == (abs(r.initial.z20) < strong_params.filter_threshold)
            assert (r.outcome is None) == r.filtered_out

    def test_filter_rate(self, strong_params: PhysParams):
        n = 20_000
        rounds = generate_rounds(n, strong_params, 3)
        rate = expected_filter_rate(strong_params)
        observed = sum(r.filtered_out for r in rounds) / n
        assert abs(observed - rate) <= 3 * math.sqrt(rate * (1 - rate) / n)

    @pytest.mark.slow
    def test_filter_rate_with_slit(self, strong_params: PhysParams):
        n = 100_000
        rounds = generate_rounds(
            n, strong_params, 4, protocol=ProtocolSettings(enforce_slit=True)
        )
        rate = expected_filter_rate(strong_params, slit=True)
        observed = sum(r.filtered_out for r in rounds) / n
        assert abs(observed - rate) <= 3 * math.sqrt(rate * (1 - rate) / n)

    def test_sign_law_outcomes(self, strong_params: PhysParams):
        for r in generate_rounds(500, strong_params, 6):
            if r.outcome is not None and r.settings.aligned:
                assert r.outcome.w_b == np.sign(r.initial.z20)
                assert r.outcome.w_a == -r.outcome.w_b * r.settings.s

    def test_fixed_choices(self, strong_params: PhysParams):
        protocol = ProtocolSettings(fixed_s=-1, fixed_delta=ORTHOGONAL)
        rounds = generate_rounds(100, strong_params, 6, protocol=protocol)
        assert {r.settings.s for r in rounds} == {-1}
        assert not any(r.settings.aligned for r in rounds)

    def test_intercept_needs_oracle(self):
        with pytest.raises(ConfigurationError, match="quantum_oracle"):
            check_mode(OutcomeMode.SIGN_LAW, ProtocolSettings(intercept_fraction=0.2))


class TestOracle:
    def test_aligned_singlet_is_anticorrelated(self):
        rng = np.random.default_rng(0)
        for s in (1, -1):
            for _ in range(200):
                o = singlet_outcomes(0.0, 0.0, s, rng)
                assert o.w_b == -o.w_a * s

    def test_intercept_keeps_aligned_anticorrelation(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            o = intercepted_outcomes(0.0, 0.0, 1, rng)
            assert o.w_b == -o.w_a

    @pytest.mark.parametrize("angle", [math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    def test_singlet_correlation(self, angle: float):
        rng = np.random.default_rng(2)
        n = 20_000
        products = [
            (o := singlet_outcomes(0.0, angle, -1, rng)).w_a * -1 * o.w_b for _ in range(n)
        ]
        assert np.mean(products) == pytest.approx(-math.cos(angle), abs=4 / math.sqrt(n))


class TestChsh:
    def test_quantum_value(self, strong_params: PhysParams):
        rounds = simulate_bell_rounds(20_000, strong_params, 8)
        estimate = chsh_estimate(rounds)
        assert estimate.value < 0
        assert estimate.magnitude == pytest.approx(QUANTUM_BOUND, abs=0.1)
        assert set(estimate.counts) == {"a,b", "a,b'", "a',b", "a',b'"}

    def test_full_interception_is_classical(self, strong_params: PhysParams):
        rounds = simulate_bell_rounds(20_000, strong_params, 8, intercept_fraction=1.0)
        assert chsh_estimate(rounds).magnitude == pytest.approx(math.sqrt(2), abs=0.1)

    def test_too_few_rounds(self, strong_params: PhysParams):
        rounds = simulate_bell_rounds(100, strong_params, 8)
        with pytest.raises(InsufficientStatisticsError):
            chsh_estimate(rounds)

    @pytest.mark.slow
    def test_quantum_value_precise(self, strong_params: PhysParams):
        n = 125_000
        rounds = simulate_bell_rounds(n, strong_params, 10, ChshAngles(), workers=4)
        estimate = chsh_estimate(rounds)
        assert sum(estimate.counts.values()) >= 100_000
        assert estimate.magnitude == pytest.approx(2 * math.sqrt(2), abs=0.05)


class TestSifting:
    def test_subset_size(self, strong_params: PhysParams):
        rounds = generate_rounds(1000, strong_params, 11)
        eligible = sum(not r.filtered_out for r in rounds)
        announced = select_test_subset(rounds, 0.3, np.random.default_rng(0))
        assert sum(r.announced_for_test for r in announced) == round(0.3 * eligible)
        assert all(r.announced_s == r.settings.s for r in announced if r.announced_for_test)

    def test_subset_fraction_bounds(self):
        with pytest.raises(ValueError, match="test_fraction"):
            select_test_subset([], 1.0, np.random.default_rng(0))

    def test_keys_agree(self, strong_params: PhysParams):
        rounds = generate_rounds(2000, strong_params, 12)
        transcript = sift_and_verify(
            rounds, 0.5, 0.2, np.random.default_rng(1), check_bell=False
        )
        alice, bob = extract_key(transcript)
        assert alice == bob
        assert len(alice) == len(transcript.key_rounds) > 0
        assert transcript.chsh_estimates == {}

    def test_injected_violation_aborts(self, strong_params: PhysParams):
        rounds = generate_rounds(2000, strong_params, 13)
        announced = select_test_subset(rounds, 0.5, np.random.default_rng(2))
        transcript = verify_and_extract(
            inject_anticorrelation_violation(announced), check_bell=False
        )
        assert transcript.aborted
        assert transcript.abort_reason == AbortReason.ANTICORRELATION_VIOLATION
        assert transcript.alice_key == ""
        with pytest.raises(AbortedSessionError):
            extract_key(transcript)

    def test_no_key_rounds(self):
        with pytest.raises(InsufficientRoundsError):
            verify_and_extract([], check_bell=False)

    def test_key_bias(self):
        assert key_bias("0110") == 0.5
        assert math.isnan(key_bias(""))


class TestSessionPipeline:
    def test_honest_sign_law_session(self, small_config: RunConfig):
        transcript = SessionPipeline(small_config).run()
        assert not transcript.aborted
        assert transcript.alice_key == transcript.bob_key
        assert len(transcript.test_rounds) > 0

    def test_injection_always_aborts(self):
        for seed in range(5):
            transcript = SessionPipeline(_session(master_seed=seed, n_pairs=1000)).run(
                inject_violation=True
            )
            assert transcript.abort_reason == AbortReason.ANTICORRELATION_VIOLATION

    def test_requires_protocol_regime(self):
        config = _session(params={"bob_scale": 1.0})
        with pytest.raises(ConfigurationError, match="bob_scale"):
            SessionPipeline(config).run()

    def test_oracle_session_checks_bell(self, caplog: pytest.LogCaptureFixture):
        config = _session(mode="quantum_oracle", protocol={"bell_tolerance": 0.5})
        with caplog.at_level(logging.WARNING, logger="pilotkey.orchestrator.pipeline"):
            transcript = SessionPipeline(config).run()
        assert "may abort on CHSH noise" in caplog.text
        assert not transcript.aborted
        assert set(transcript.chsh_estimates) == {1, -1}
        assert transcript.alice_key == transcript.bob_key

    def test_full_dynamics_match_sign_law_inside_slit(self):
        common = {
            "n_pairs": 300,
            "protocol": {"enforce_slit": True},
            "integrator": {"t_end": 10.0, "dt": 1e-2},
        }
        ode = SessionPipeline(_session(mode="full_ode", **common)).run()
        law = SessionPipeline(_session(mode="sign_law", **common)).run()
        assert ode.alice_key == law.alice_key
        assert ode.bob_key == law.bob_key

    @pytest.mark.slow
    def test_honest_sessions_never_abort(self):
        ones = total = 0
        for seed in range(100):
            transcript = SessionPipeline(_session(master_seed=seed)).run()
            assert not transcript.aborted
            assert transcript.alice_key == transcript.bob_key
            ones += transcript.alice_key.count("1")
            total += len(transcript.alice_key)
        assert 0.48 <= ones / total <= 0.52

    @pytest.mark.slow
    def test_honest_oracle_sessions_pass_bell_check(self):
        aborts = 0
        for seed in range(40):
            config = _session(
                master_seed=seed,
                n_pairs=BELL_CHECK_MIN_PAIRS,
                mode="quantum_oracle",
                protocol={"workers": 4},
            )
            aborts += SessionPipeline(config).run().aborted
        assert aborts == 0

    @pytest.mark.slow
    def test_interception_is_detected(self):
        aborts = 0
        for seed in range(100):
            config = _session(
                master_seed=seed,
                n_pairs=30_000,
                mode="quantum_oracle",
                protocol={"intercept_fraction": 0.2, "workers": 4},
            )
            transcript = SessionPipeline(config).run()
            aborts += transcript.abort_reason == AbortReason.BELL_VIOLATION
        assert aborts >= 95
