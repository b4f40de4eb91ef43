"""Key-distribution protocol: rounds, statistics oracle, sifting and CHSH."""

from __future__ import annotations

from pilotkey.protocol.chsh import (
    QUANTUM_BOUND,
    chsh_estimate,
    simulate_bell_rounds,
)
from pilotkey.protocol.oracle import intercepted_outcomes, singlet_outcomes
from pilotkey.protocol.rounds import check_mode, generate_rounds, run_round
from pilotkey.protocol.sifting import (
    expected_filter_rate,
    extract_key,
    inject_anticorrelation_violation,
    key_bias,
    select_test_subset,
    sift_and_verify,
    verify_and_extract,
)


__all__ = [
    "QUANTUM_BOUND",
    "check_mode",
    "chsh_estimate",
    "expected_filter_rate",
    "extract_key",
    "generate_rounds",
    "inject_anticorrelation_violation",
    "intercepted_outcomes",
    "key_bias",
    "run_round",
    "select_test_subset",
    "sift_and_verify",
    "simulate_bell_rounds",
    "singlet_outcomes",
    "verify_and_extract",
]
