"""Registry of named verification checks run by the ``verify`` subcommand."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, ClassVar

from pilotkey.core.models import CheckReport, GridSpec, RoundSettings
from pilotkey.verification.checks import (
    check_continuity,
    check_current_consistency,
    check_density_oracle,
    check_equivariance,
    check_integrator_order,
    check_normalization,
    check_wavefunction_current,
)


if TYPE_CHECKING:
    from pilotkey.config.settings import RunConfig
    from pilotkey.core.models import PhysParams


logger = logging.getLogger(__name__)


class Check(ABC):
    """Base class for verification checks.

    A check is configured at construction and produces one CheckReport per run.
    Its ``name`` is unique within a suite.
    """

    name: ClassVar[str]
    description: ClassVar[str]

    def __init__(self, params: PhysParams, s: int = 1) -> None:
        self.params = params
        self.s = s

    @property
    def key(self) -> str:
        return f"{self.name}[s={self.s:+d}]"

    @abstractmethod
    def run(self) -> CheckReport:
        """Run the check."""
        ...


class DensityOracleCheck(Check):
    name: ClassVar[str] = "density_oracle"
    description: ClassVar[str] = "|psi|^2 from the spinor equals the closed-form density"

    def __init__(self, params: PhysParams, grid: GridSpec, s: int = 1) -> None:
        super().__init__(params, s)
        self.grid = grid

    def run(self) -> CheckReport:
        return check_density_oracle(self.grid, self.params, self.s)


class CurrentConsistencyCheck(Check):
    name: ClassVar[str] = "current_consistency"
    description: ClassVar[str] = "closed-form currents equal rho times guidance velocity"

    def __init__(
        self, params: PhysParams, grid: GridSpec, s: int = 1, fuzz_points: int = 0, seed: int = 0
    ) -> None:
        super().__init__(params, s)
        self.grid = grid
        self.fuzz_points = fuzz_points
        self.seed = seed

    def run(self) -> CheckReport:
        return check_current_consistency(
            self.grid, self.params, self.s, fuzz_points=self.fuzz_points, seed=self.seed
        )


class ContinuityCheck(Check):
    name: ClassVar[str] = "continuity"
    description: ClassVar[str] = "discrete continuity residual converges at second order"

    def __init__(self, params: PhysParams, grid: GridSpec, s: int = 1, h: float = 1e-3) -> None:
        super().__init__(params, s)
        self.grid = grid
        self.h = h

    def run(self) -> CheckReport:
        return check_continuity(self.grid, self.params, self.s, self.h)


class EquivarianceCheck(Check):
    name: ClassVar[str] = "equivariance"
    description: ClassVar[str] = "transported equilibrium ensemble stays |psi|^2 distributed"

    def __init__(
        self,
        params: PhysParams,
        s: int = 1,
        n_samples: int = 100_000,
        t_probe: float = 0.2,
        n_bins: int = 50,
        seed: int = 0,
        dt: float = 1e-3,
    ) -> None:
        super().__init__(params, s)
        self.n_samples = n_samples
        self.t_probe = t_probe
        self.n_bins = n_bins
        self.seed = seed
        self.dt = dt

    def run(self) -> CheckReport:
        return check_equivariance(
            self.n_samples,
            self.t_probe,
            self.params,
            RoundSettings(s=self.s),
            seed=self.seed,
            n_bins=self.n_bins,
            dt=self.dt,
        )


class NormalizationCheck(Check):
    name: ClassVar[str] = "normalization"
    description: ClassVar[str] = "density integrates to one at every probe time"

    def __init__(self, params: PhysParams, times: list[float], s: int = 1) -> None:
        super().__init__(params, s)
        self.times = times

    def run(self) -> CheckReport:
        return check_normalization(self.params, self.s, self.times)


class WavefunctionCurrentCheck(Check):
    name: ClassVar[str] = "wavefunction_current"
    description: ClassVar[str] = "currents differentiated from the spinor match the closed forms"

    def __init__(self, params: PhysParams, grid: GridSpec, s: int = 1) -> None:
        super().__init__(params, s)
        self.grid = grid

    def run(self) -> CheckReport:
        return check_wavefunction_current(self.grid, self.params, self.s)


class IntegratorOrderCheck(Check):
    name: ClassVar[str] = "integrator_order"
    description: ClassVar[str] = "RK4 final positions converge at fourth order"

    def __init__(self, params: PhysParams, s: int = 1, n_initial: int = 10, seed: int = 0) -> None:
        super().__init__(params, s)
        self.n_initial = n_initial
        self.seed = seed

    def run(self) -> CheckReport:
        return check_integrator_order(self.params, self.n_initial, self.seed, s=self.s)


class VerificationSuite:
    """Named collection of checks, run in registration order."""

    def __init__(self, checks: list[Check] | None = None) -> None:
        self.checks: dict[str, Check] = {}
        for check in checks or []:
            self.register(check)

    def register(self, check: Check) -> None:
        if check.key in self.checks:
            msg = f"check {check.key} is already registered"
            raise ValueError(msg)
        self.checks[check.key] = check

    def run_check(self, key: str) -> CheckReport:
        """Run one check; an unexpected exception becomes a failed report."""
        if key not in self.checks:
            return CheckReport(
                check_name=key,
                max_abs_error=float("nan"),
                max_rel_error=float("nan"),
                passed=False,
                tolerance=0.0,
            )
        check = self.checks[key]
        try:
            return check.run()
        except Exception:
            logger.exception("Check failed to run: %s", key)
            return CheckReport(
                check_name=check.name,
                max_abs_error=float("nan"),
                max_rel_error=float("nan"),
                passed=False,
                tolerance=0.0,
                details={"s": float(check.s)},
            )

    def run_all(self) -> list[CheckReport]:
        reports = []
        for key in self.checks:
            logger.info("Running check %s", key)
            report = self.run_check(key)
            logger.debug("%s: passed=%s rel=%.3e", key, report.passed, report.max_rel_error)
            reports.append(report)
        return reports

    @classmethod
    def from_config(cls, config: RunConfig) -> VerificationSuite:
        """The standard suite for both field flips."""
        p = config.params
        v = config.verification
        grid = GridSpec.default(p, times=list(v.times), n_points=v.n_points)
        suite = cls()
        for s in (1, -1):
            suite.register(DensityOracleCheck(p, grid, s))
            suite.register(
                CurrentConsistencyCheck(
                    p, grid, s, fuzz_points=v.fuzz_points, seed=config.master_seed
                )
            )
            suite.register(ContinuityCheck(p, grid, s, v.continuity_step))
            suite.register(WavefunctionCurrentCheck(p, grid, s))
            suite.register(NormalizationCheck(p, list(v.normalization_times), s))
            suite.register(
                EquivarianceCheck(
                    p,
                    s,
                    n_samples=v.equivariance_samples,
                    t_probe=v.t_probe,
                    n_bins=v.equivariance_bins,
                    seed=config.master_seed,
                    dt=config.integrator.dt,
                )
            )
            suite.register(
                IntegratorOrderCheck(p, s, n_initial=v.order_pairs, seed=config.master_seed)
            )
        return suite
