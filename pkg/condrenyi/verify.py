"""Property-verification suites

Each suite samples random inputs per trial, evaluates both sides of a relation and records
the signed slack. Trial streams are derived from (seed, trial index) so that records are
identical for identical suite specifications, whatever the number of workers.
"""

from __future__ import annotations

import concurrent.futures
import enum
import json
import logging
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np
import numpy.typing as npt

from .divergences import (
    AlphaLike,
    AlphaParam,
    DensityOperator,
    d_alpha_z,
    d_old,
    d_sandwiched,
    relative_entropy,
    renyi_entropy,
)
from .entropies import (
    Arrow,
    Divergence,
    EntropyKind,
    EntropyResult,
    collision_entropy,
    conditional_von_neumann,
    entropy,
    h_down_sandwiched,
)
from .fileio import jsonable
from .objects import (
    KrausChannel,
    Povm,
    SeededRng,
    apply,
    classical_state,
    digest,
    haar_isometry,
    overlap,
    post_measurement_state,
    post_measurement_states,
    random_channel,
    random_density,
    random_distribution,
    random_pure_state,
)
from .operators import (
    SUPPORT_CUTOFF,
    Direction,
    SubsystemLayout,
    eig_hermitian,
    fidelity,
    holder_pair_check,
    operator_power,
    pinch,
    trace_power,
)
from .optimize import OptimizerConfig

__all__ = [
    "DEFAULT_ALPHAS",
    "PAIRINGS",
    "Suite",
    "SuiteSpec",
    "SuiteSpecError",
    "TrialRecord",
    "VerificationReport",
    "classical_down",
    "classical_up",
    "converse_bound",
    "corollary_order",
    "dual_order",
    "run_classical_oracle",
    "run_divergence_ordering",
    "run_dpi",
    "run_duality",
    "run_holder",
    "run_isometry",
    "run_limits",
    "run_maassen_uffink",
    "run_monotone_alpha",
    "run_mosonyi",
    "run_ordering",
    "run_sandwich_corollary",
    "run_stinespring",
    "run_suite",
    "run_uncertainty",
]

REPORT_SCHEMA = 1

DEFAULT_ALPHAS = (0, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, math.inf)
DEFAULT_TRIALS = 200

# equalities that involve the sandwiched UP optimizer on both sides
OPTIMIZER_TOLERANCE = 1e-6

# orders 1 ± BRACKET bracket the von Neumann value; both sides must agree within BRACKET_SPREAD
BRACKET = 1e-4
BRACKET_SPREAD = 1e-3

COLLISION_TOLERANCE = 1e-9

logger = logging.getLogger(__name__)


class SuiteSpecError(ValueError):
    """Suite specification violates the arity or order range of its suite"""

    pass


class Suite(enum.Enum):
    DUALITY_1 = "duality1"
    DUALITY_2 = "duality2"
    DUALITY_3 = "duality3"
    ORDERING = "ordering"
    COROLLARY = "corollary"
    MONOTONE_ALPHA = "monotone-alpha"
    DPI = "dpi"
    HOLDER = "holder"
    MOSONYI = "mosonyi"
    DIVERGENCE_ORDERING = "divergence-ordering"
    UNCERTAINTY_1 = "uncertainty1"
    UNCERTAINTY_2 = "uncertainty2"
    UNCERTAINTY_3 = "uncertainty3"
    MAASSEN_UFFINK = "maassen-uffink"
    CLASSICAL_ORACLE = "classical-oracle"
    LIMITS = "limits"
    ISOMETRY = "isometry"
    STINESPRING = "stinespring"

    @classmethod
    def parse(cls, text: str) -> Suite:
        normalized = text.strip().lower().replace("_", "-")
        for suite in cls:
            if normalized in (suite.value, suite.name.lower().replace("_", "-")):
                return suite
        raise SuiteSpecError(
            f"unknown suite {text!r}; expected one of {', '.join(s.value for s in cls)}"
        )


class SuiteInfo(NamedTuple):
    """Defaults and the admissible order range of a suite

    arity is the required number of subsystem dimensions, or None when dims lists the
    candidate dimensions of single-system inputs.
    """

    arity: int | None
    dims: tuple[int, ...]
    alphas: tuple[float, ...]
    tolerance: float
    low: float
    high: float
    exclude_one: bool = False


_INF = math.inf

SUITES: dict[Suite, SuiteInfo] = {
    Suite.DUALITY_1: SuiteInfo(3, (2, 2, 2), (0, 0.5, 1, 1.5, 2), 1e-8, 0, 2),
    Suite.DUALITY_2: SuiteInfo(3, (2, 2, 2), (0.6, 0.75, 1.5, 3), 1e-5, 0.5, _INF),
    Suite.DUALITY_3: SuiteInfo(3, (2, 2, 2), (0, 0.25, 0.5, 2, 4), 1e-8, 0, _INF),
    Suite.ORDERING: SuiteInfo(2, (2, 2), DEFAULT_ALPHAS, 1e-6, 0, _INF),
    Suite.COROLLARY: SuiteInfo(2, (2, 2), (0.5, 0.75, 1.5, 2, _INF), 1e-6, 0.5, _INF),
    Suite.MONOTONE_ALPHA: SuiteInfo(2, (2, 2), DEFAULT_ALPHAS, 1e-6, 0, _INF),
    Suite.DPI: SuiteInfo(2, (2, 2), (0.5, 1, 2, 5, _INF), 1e-6, 0, _INF),
    Suite.HOLDER: SuiteInfo(None, (2, 3, 4, 5, 6), (2, 3, 0.5, 0.25), 1e-8, 0, _INF, True),
    Suite.MOSONYI: SuiteInfo(None, (2, 3, 4), (1.5, 2, 3), 1e-8, 1, _INF, True),
    Suite.DIVERGENCE_ORDERING: SuiteInfo(None, (2, 3, 4), (0.25, 0.5, 0.75, 1.5, 2, 3, _INF), 1e-8, 0, _INF),
    Suite.UNCERTAINTY_1: SuiteInfo(3, (2, 2, 2), (0, 0.5, 1, 1.5, 2), 1e-6, 0, 2),
    Suite.UNCERTAINTY_2: SuiteInfo(3, (2, 2, 2), (0.5, 0.75, 1, 1.5, 3, _INF), 1e-6, 0.5, _INF),
    Suite.UNCERTAINTY_3: SuiteInfo(3, (2, 2, 2), (0, 0.5, 1, 1.5, 2), 1e-6, 0, 2),
    Suite.MAASSEN_UFFINK: SuiteInfo(3, (2, 2, 2), (0.5, 0.75, 1, 1.5, 3, _INF), 1e-6, 0.5, _INF),
    Suite.CLASSICAL_ORACLE: SuiteInfo(2, (2, 3), (0, 0.25, 0.5, 1, 2, 3, _INF), 1e-9, 0, _INF),
    Suite.LIMITS: SuiteInfo(2, (2, 2), (1,), 1e-6, 1, 1),
    Suite.ISOMETRY: SuiteInfo(2, (2, 2), (0, 0.5, 1, 2, _INF), 1e-8, 0, _INF),
    Suite.STINESPRING: SuiteInfo(3, (2, 2, 2), (0.5, 0.75, 1, 1.5, 2), 1e-8, 0.5, 2),
}

# entropy kinds paired by the duality relations and the uncertainty relations built on them
PAIRINGS: dict[int, tuple[EntropyKind, EntropyKind]] = {
    1: (EntropyKind.OLD_DOWN, EntropyKind.OLD_DOWN),
    2: (EntropyKind.SANDWICHED_UP, EntropyKind.SANDWICHED_UP),
    3: (EntropyKind.OLD_UP, EntropyKind.SANDWICHED_DOWN),
}

_DUALITY = {1: Suite.DUALITY_1, 2: Suite.DUALITY_2, 3: Suite.DUALITY_3}
_UNCERTAINTY = {Suite.UNCERTAINTY_1: 1, Suite.UNCERTAINTY_2: 2, Suite.UNCERTAINTY_3: 3}


def dual_order(which: int, alpha: AlphaLike) -> AlphaParam:
    """Partner order: β = 2 - α (1), 1/α + 1/β = 2 (2) or α·β = 1 (3)"""
    a = float(AlphaParam.of(alpha))
    match which:
        case 1:
            if a > 2:
                raise SuiteSpecError(f"alpha={a} has no partner with alpha + beta = 2")
            return AlphaParam.of(2 - a)
        case 2:
            if a < 0.5:
                raise SuiteSpecError(f"alpha={a} has no partner with 1/alpha + 1/beta = 2")
            if a == 0.5:
                return AlphaParam.INFINITY
            if math.isinf(a):
                return AlphaParam.of(0.5)
            return AlphaParam.of(a / (2 * a - 1))
        case 3:
            if a == 0:
                return AlphaParam.INFINITY
            return AlphaParam.of(0 if math.isinf(a) else 1 / a)
    raise SuiteSpecError(f"unknown relation {which!r}; expected 1, 2 or 3")


def corollary_order(alpha: AlphaLike) -> AlphaParam:
    """2 - 1/α, the upper order of the sandwich inequalities (2 at α = ∞)"""
    a = float(AlphaParam.of(alpha))
    if a < 0.5:
        raise SuiteSpecError(f"the sandwich inequalities need alpha >= 0.5, got {a}")
    return AlphaParam.of(2 if math.isinf(a) else 2 - 1 / a)


@dataclass(frozen=True)
class SuiteSpec:
    """One suite run: layout, order grid, trial count, seed and tolerance

    Use SuiteSpec.create() to fill in the suite defaults.
    """

    suite: Suite
    dims: tuple[int, ...]
    alpha_grid: tuple[AlphaParam, ...]
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    tolerance: float = 1e-8
    workers: int = 1
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    measurements: tuple[Povm, Povm] | None = None

    def __post_init__(self):
        info = SUITES[self.suite]
        if self.trials < 1:
            raise SuiteSpecError(f"trials must be at least 1, got {self.trials}")
        if self.seed < 0:
            raise SuiteSpecError(f"seed must be nonnegative, got {self.seed}")
        if not self.tolerance > 0:
            raise SuiteSpecError(f"tolerance must be positive, got {self.tolerance}")
        if self.workers < 1:
            raise SuiteSpecError(f"workers must be at least 1, got {self.workers}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise SuiteSpecError(f"dims must be positive integers, got {self.dims}")
        if info.arity is not None and len(self.dims) != info.arity:
            raise SuiteSpecError(
                f"{self.suite.value} needs {info.arity} subsystem dimensions, got {len(self.dims)}"
            )
        if not self.alpha_grid:
            raise SuiteSpecError("the order grid is empty")
        for alpha in self.alpha_grid:
            a = float(alpha)
            if not info.low <= a <= info.high or (info.exclude_one and a == 1):
                raise SuiteSpecError(
                    f"alpha={a} outside the range [{info.low}, {info.high}] of {self.suite.value}"
                    + (" (excluding 1)" if info.exclude_one else "")
                )
        if self.suite is Suite.MOSONYI and any(math.isinf(float(a)) for a in self.alpha_grid):
            raise SuiteSpecError("mosonyi needs finite orders")
        if self.suite is Suite.HOLDER and any(math.isinf(float(a)) for a in self.alpha_grid):
            raise SuiteSpecError("holder needs finite exponents")
        if self.measurements is not None:
            if self.suite not in (*_UNCERTAINTY, Suite.MAASSEN_UFFINK):
                raise SuiteSpecError(f"{self.suite.value} takes no measurements")
            if any(m.dim != self.dims[0] for m in self.measurements):
                raise SuiteSpecError(
                    f"measurements must act on dimension {self.dims[0]} of the measured system"
                )

    @classmethod
    def create(
        cls,
        suite: Suite | str,
        dims: Sequence[int] | None = None,
        alphas: Sequence[AlphaLike] | None = None,
        trials: int = DEFAULT_TRIALS,
        seed: int = 0,
        tolerance: float | None = None,
        workers: int = 1,
        optimizer: OptimizerConfig | None = None,
        measurements: tuple[Povm, Povm] | None = None,
    ) -> SuiteSpec:
        """Build a spec, taking dims, orders and tolerance from the suite defaults when omitted"""
        suite = suite if isinstance(suite, Suite) else Suite.parse(suite)
        info = SUITES[suite]
        return cls(
            suite=suite,
            dims=tuple(int(d) for d in (dims or info.dims)),
            alpha_grid=tuple(AlphaParam.of(a) for a in (info.alphas if alphas is None else alphas)),
            trials=int(trials),
            seed=int(seed),
            tolerance=info.tolerance if tolerance is None else float(tolerance),
            workers=int(workers),
            optimizer=optimizer or OptimizerConfig(),
            measurements=measurements,
        )

    def asdict(self) -> dict[str, Any]:
        data = {
            "suite": self.suite.value,
            "dims": list(self.dims),
            "alpha_grid": [float(a) for a in self.alpha_grid],
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "workers": self.workers,
            "optimizer": self.optimizer.asdict(),
            "measurements": None,
        }
        if self.measurements is not None:
            m, n = self.measurements
            data["measurements"] = {"outcomes": [len(m), len(n)], "overlap": overlap(m, n)}
        return jsonable(data)


@dataclass
class TrialRecord:
    """One checked relation of one trial

    slack is negative when the relation fails (for equalities it is minus the gap);
    residual is the size of the failure, zero for satisfied inequalities.
    """

    trial: int
    digest: str
    relation: str
    direction: str
    lhs: float
    rhs: float
    slack: float
    residual: float
    alpha: float | None = None
    beta: float | None = None
    violated: bool = False
    converged: bool = True
    error: str | None = None

    def asdict(self) -> dict[str, Any]:
        return jsonable(asdict(self))


@dataclass
class VerificationReport:
    """Records of every trial of a suite and their summary"""

    spec: SuiteSpec
    records: list[TrialRecord]
    summary: dict[str, Any]
    schema: int = REPORT_SCHEMA

    @property
    def violations(self) -> int:
        return self.summary["violations"]

    @property
    def errors(self) -> int:
        return self.summary["errors"]

    @property
    def converged_fraction(self) -> float:
        """Share of checked relations whose optimizer converged, 1.0 without checks"""
        checks = self.summary["checks"]
        return (checks - self.summary["not_converged"]) / checks if checks else 1.0

    @property
    def exit_code(self) -> int:
        """0 without violations and hard errors, 1 otherwise"""
        return 0 if self.violations == 0 and self.errors == 0 else 1

    def asdict(self) -> dict[str, Any]:
        return {
            "schema": self.schema,
            "suite": self.spec.asdict(),
            "trials": [record.asdict() for record in self.records],
            "summary": jsonable(self.summary),
        }

    def json(self, indent: int | None = None) -> str:
        def _default(obj):
            if isinstance(obj, np.generic):
                return obj.item()
            raise TypeError(
                f"Object of type {obj.__class__.__name__} is not JSON serializable"
            )

        return json.dumps(self.asdict(), indent=indent, default=_default)


class _Trial:
    """Collects the records of one trial"""

    def __init__(self, spec: SuiteSpec, index: int):
        self.spec = spec
        self.index = index
        self.digest = ""
        self.records: list[TrialRecord] = []

    def check(
        self,
        relation: str,
        lhs: float,
        rhs: float,
        direction: Direction,
        alpha: AlphaLike | None = None,
        beta: AlphaLike | None = None,
        converged: bool = True,
        tolerance: float | None = None,
    ):
        """Record lhs ? rhs; the tolerance scales with the magnitude of the sides above 1"""
        tolerance = self.spec.tolerance if tolerance is None else tolerance
        lhs, rhs = float(lhs), float(rhs)
        slack = 0.0 if lhs == rhs else direction.slack(lhs, rhs)
        if math.isnan(slack):
            residual = math.inf
        elif direction is Direction.EQ:
            residual = -slack
        else:
            residual = max(0.0, -slack)
        scale = max([1.0] + [abs(x) for x in (lhs, rhs) if math.isfinite(x)])
        self.records.append(
            TrialRecord(
                trial=self.index,
                digest=self.digest,
                relation=relation,
                direction=direction.value,
                lhs=lhs,
                rhs=rhs,
                slack=slack,
                residual=residual,
                alpha=None if alpha is None else float(AlphaParam.of(alpha)),
                beta=None if beta is None else float(AlphaParam.of(beta)),
                violated=residual > tolerance * scale,
                converged=converged,
            )
        )

    def fail(self, error: Exception):
        self.records.append(
            TrialRecord(
                trial=self.index,
                digest=self.digest,
                relation="",
                direction="",
                lhs=math.nan,
                rhs=math.nan,
                slack=math.nan,
                residual=math.nan,
                error=f"{error.__class__.__name__}: {error}",
            )
        )


TrialFunction = Callable[[_Trial, np.random.Generator], None]


def _summarize(records: list[TrialRecord], runtime: float) -> dict[str, Any]:
    checked = [r for r in records if r.error is None]
    converged = [r for r in checked if r.converged]
    residuals = [r.residual for r in converged]
    return {
        "checks": len(checked),
        "max_residual": max(residuals, default=0.0),
        "mean_residual": statistics.fmean(residuals) if residuals else 0.0,
        "violations": sum(r.violated for r in converged),
        "not_converged": len(checked) - len(converged),
        "errors": len({r.trial for r in records if r.error is not None}),
        "runtime": round(runtime, 3),
    }


def _run(spec: SuiteSpec, trial: TrialFunction) -> VerificationReport:
    """Run trial for every index, in a thread pool when spec.workers > 1"""
    start = time.perf_counter()
    root = SeededRng(spec.seed)

    def run_one(index: int) -> list[TrialRecord]:
        current = _Trial(spec, index)
        try:
            trial(current, root.child(index).generator())
        except Exception as e:
            logger.warning(f"_run: {spec.suite.value} trial {index} failed: {e}")
            current.fail(e)
        return current.records

    if spec.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=spec.workers) as pool:
            batches = list(pool.map(run_one, range(spec.trials)))
    else:
        batches = [run_one(index) for index in range(spec.trials)]
    records = [record for batch in batches for record in batch]
    summary = _summarize(records, time.perf_counter() - start)
    logger.info(
        f"_run: {spec.suite.value} {spec.trials} trials, violations={summary['violations']}, "
        f"errors={summary['errors']}, max_residual={summary['max_residual']:.3e}"
    )
    return VerificationReport(spec, records, summary)


def _expect(spec: SuiteSpec, *suites: Suite):
    if spec.suite not in suites:
        raise SuiteSpecError(
            f"expected a {' or '.join(s.value for s in suites)} spec, got {spec.suite.value}"
        )


def _name(kind: EntropyKind, alpha: AlphaLike, target: str = "A", cond: str = "B") -> str:
    return f"{kind.slug}[{AlphaParam.of(alpha)}]({target}|{cond})"


def _admits(kind: EntropyKind, alpha: AlphaParam) -> bool:
    """Sandwiched UP comparisons are restricted to the convex regime α ≥ 1/2"""
    return kind is not EntropyKind.SANDWICHED_UP or float(alpha) >= 0.5


class _Entropies:
    """Memoized entropies of one state for one target and conditioning split"""

    def __init__(self, rho: DensityOperator, target: str | Sequence[str], cond: str | Sequence[str], config: OptimizerConfig):
        self.rho = rho
        self.target = target
        self.cond = cond
        self.config = config
        self._values: dict[tuple[EntropyKind, AlphaParam], EntropyResult] = {}

    def __call__(self, kind: EntropyKind, alpha: AlphaLike) -> EntropyResult:
        key = (kind, AlphaParam.of(alpha))
        if key not in self._values:
            self._values[key] = entropy(kind, self.rho, None, self.target, self.cond, key[1], self.config)
        return self._values[key]


def _tripartite(t: _Trial, rng: np.random.Generator):
    psi = random_pure_state(SubsystemLayout.from_dims(t.spec.dims), rng)
    t.digest = digest(psi.vector)
    return psi


def _bipartite(t: _Trial, rng: np.random.Generator) -> DensityOperator:
    """Random state on the suite layout; odd trials are rank deficient"""
    layout = SubsystemLayout.from_dims(t.spec.dims)
    rank = None if t.index % 2 == 0 else max(1, layout.dim // 2)
    rho = random_density(layout, rank, rng)
    t.digest = digest(rho.op)
    return rho


def _single(t: _Trial, rng: np.random.Generator) -> tuple[DensityOperator, DensityOperator]:
    """(ρ, σ) on one of the candidate dimensions; σ full rank, ρ rank deficient on odd trials"""
    dim = int(rng.choice(t.spec.dims))
    rank = None if t.index % 2 == 0 else max(1, dim // 2)
    rho = random_density(dim, rank, rng)
    sigma = random_density(dim, None, rng)
    t.digest = digest(rho.op, sigma.op)
    return rho, sigma


def run_duality(which: int, spec: SuiteSpec) -> VerificationReport:
    """H_α(A|B) + H_β(A|C) = 0 on random pure states for the chosen duality relation"""
    if which not in PAIRINGS:
        raise SuiteSpecError(f"unknown duality relation {which!r}; expected 1, 2 or 3")
    _expect(spec, _DUALITY[which])
    left, right = PAIRINGS[which]

    def trial(t: _Trial, rng: np.random.Generator):
        rho = _tripartite(t, rng).density()
        ab = _Entropies(rho, "A", "B", spec.optimizer)
        ac = _Entropies(rho, "A", "C", spec.optimizer)
        for alpha in spec.alpha_grid:
            beta = dual_order(which, alpha)
            lhs = ab(left, alpha)
            rhs = ac(right, beta)
            t.check(
                f"{_name(left, alpha)} + {_name(right, beta, 'A', 'C')} = 0",
                lhs.value,
                -rhs.value,
                Direction.EQ,
                alpha,
                beta,
                lhs.converged and rhs.converged,
            )

    return _run(spec, trial)


# (smaller, larger) pairs of the ordering diagram
_ORDERING = (
    (EntropyKind.OLD_DOWN, EntropyKind.OLD_UP),
    (EntropyKind.OLD_DOWN, EntropyKind.SANDWICHED_DOWN),
    (EntropyKind.SANDWICHED_DOWN, EntropyKind.SANDWICHED_UP),
    (EntropyKind.OLD_UP, EntropyKind.SANDWICHED_UP),
)

# (lower at α, middle at α, upper at 2 - 1/α)
_CHAINS = (
    (EntropyKind.OLD_UP, EntropyKind.SANDWICHED_UP, EntropyKind.OLD_UP),
    (EntropyKind.OLD_DOWN, EntropyKind.OLD_UP, EntropyKind.OLD_DOWN),
    (EntropyKind.SANDWICHED_DOWN, EntropyKind.SANDWICHED_UP, EntropyKind.SANDWICHED_DOWN),
    (EntropyKind.OLD_DOWN, EntropyKind.SANDWICHED_DOWN, EntropyKind.OLD_DOWN),
)


def run_ordering(spec: SuiteSpec) -> VerificationReport:
    """DOWN ≤ UP and original ≤ sandwiched at every order of the grid"""
    _expect(spec, Suite.ORDERING)

    def trial(t: _Trial, rng: np.random.Generator):
        values = _Entropies(_bipartite(t, rng), "A", "B", spec.optimizer)
        for alpha in spec.alpha_grid:
            for smaller, larger in _ORDERING:
                if not _admits(larger, alpha):
                    continue
                low, high = values(smaller, alpha), values(larger, alpha)
                t.check(
                    f"{_name(smaller, alpha)} <= {_name(larger, alpha)}",
                    low.value,
                    high.value,
                    Direction.LEQ,
                    alpha,
                    converged=low.converged and high.converged,
                )

    return _run(spec, trial)


def run_sandwich_corollary(spec: SuiteSpec) -> VerificationReport:
    """lower_α ≤ middle_α ≤ upper_{2-1/α} for the four inequality chains, α ≥ 1/2"""
    _expect(spec, Suite.COROLLARY)

    def trial(t: _Trial, rng: np.random.Generator):
        values = _Entropies(_bipartite(t, rng), "A", "B", spec.optimizer)
        for alpha in spec.alpha_grid:
            gamma = corollary_order(alpha)
            for lower, middle, upper in _CHAINS:
                low, mid, high = values(lower, alpha), values(middle, alpha), values(upper, gamma)
                t.check(
                    f"{_name(lower, alpha)} <= {_name(middle, alpha)}",
                    low.value,
                    mid.value,
                    Direction.LEQ,
                    alpha,
                    converged=low.converged and mid.converged,
                )
                t.check(
                    f"{_name(middle, alpha)} <= {_name(upper, gamma)}",
                    mid.value,
                    high.value,
                    Direction.LEQ,
                    alpha,
                    gamma,
                    converged=mid.converged and high.converged,
                )

    return _run(spec, trial)


def run_monotone_alpha(spec: SuiteSpec) -> VerificationReport:
    """Entropies non-increasing and divergences non-decreasing along the sorted grid"""
    _expect(spec, Suite.MONOTONE_ALPHA)
    grid = sorted(set(spec.alpha_grid))

    def trial(t: _Trial, rng: np.random.Generator):
        rho = _bipartite(t, rng)
        sigma = random_density(rho.layout, None, rng)
        values = _Entropies(rho, "A", "B", spec.optimizer)
        for kind in EntropyKind:
            orders = [a for a in grid if _admits(kind, a)]
            for before, after in zip(orders, orders[1:]):
                first, second = values(kind, before), values(kind, after)
                t.check(
                    f"{_name(kind, after)} <= {_name(kind, before)}",
                    second.value,
                    first.value,
                    Direction.LEQ,
                    after,
                    before,
                    first.converged and second.converged,
                )
        for name, divergence in (("d_old", d_old), ("d_sandwiched", d_sandwiched)):
            for before, after in zip(grid, grid[1:]):
                t.check(
                    f"{name}[{before}] <= {name}[{after}]",
                    divergence(rho, sigma, before),
                    divergence(rho, sigma, after),
                    Direction.LEQ,
                    before,
                    after,
                )

    return _run(spec, trial)


def run_dpi(spec: SuiteSpec) -> VerificationReport:
    """Entropies cannot decrease and divergences cannot increase under a channel on B

    Original-form quantities are checked for α ∈ [0, 2], sandwiched ones for α ≥ 1/2.
    """
    _expect(spec, Suite.DPI)

    def admitted(divergence: Divergence, alpha: AlphaParam) -> bool:
        a = float(alpha)
        return a <= 2 if divergence is Divergence.OLD else a >= 0.5

    def trial(t: _Trial, rng: np.random.Generator):
        layout = SubsystemLayout.from_dims(t.spec.dims)
        rho = random_density(layout, None, rng)
        sigma = random_density(layout, None, rng)
        dim_b = layout.dims[1]
        channel = random_channel(dim_b, dim_b, dim_b, rng)
        t.digest = digest(rho.op, sigma.op, channel.stinespring())
        before = _Entropies(rho, "A", "B", spec.optimizer)
        after = _Entropies(apply(channel, rho, "B"), "A", "B", spec.optimizer)
        sigma_after = apply(channel, sigma, "B")
        for alpha in spec.alpha_grid:
            for kind in EntropyKind:
                if not admitted(kind.divergence, alpha):
                    continue
                h0, h1 = before(kind, alpha), after(kind, alpha)
                t.check(
                    f"{_name(kind, alpha, 'A', 'B_out')} >= {_name(kind, alpha)}",
                    h1.value,
                    h0.value,
                    Direction.GEQ,
                    alpha,
                    converged=h0.converged and h1.converged,
                )
            for name, divergence, form in (
                ("d_old", d_old, Divergence.OLD),
                ("d_sandwiched", d_sandwiched, Divergence.SANDWICHED),
            ):
                if not admitted(form, alpha):
                    continue
                t.check(
                    f"{name}[{alpha}](E(rho)||E(sigma)) <= {name}[{alpha}](rho||sigma)",
                    divergence(apply(channel, rho, "B"), sigma_after, alpha),
                    divergence(rho, sigma, alpha),
                    Direction.LEQ,
                    alpha,
                )

    return _run(spec, trial)


def run_holder(spec: SuiteSpec) -> VerificationReport:
    """Hölder and reverse Hölder trace inequalities with the pinching instances behind them

    The order grid holds the exponents p; A is a random PSD matrix of random rank and B a
    full-rank one, so that B >> A.
    """
    _expect(spec, Suite.HOLDER)

    def trial(t: _Trial, rng: np.random.Generator):
        dim = int(rng.choice(spec.dims))
        rank = int(rng.integers(1, dim + 1))
        a = random_density(dim, rank, rng).op * rng.uniform(0.5, 2)
        b = random_density(dim, None, rng).op * rng.uniform(0.5, 2)
        t.digest = digest(a, b)
        pinched = pinch(a, b)
        for alpha in spec.alpha_grid:
            p = float(alpha)
            check = holder_pair_check(a, b, p)
            t.check(f"tr AB vs Hölder bound, p={p}", check.lhs, check.rhs, check.direction, p)
            if p > 1:
                t.check(
                    f"tr pinch(A,B)^{p} <= tr A^{p}",
                    trace_power(pinched, p),
                    trace_power(a, p),
                    Direction.LEQ,
                    p,
                )
            else:
                difference = operator_power(pinched, p) - pinch(operator_power(a, p), b)
                t.check(
                    f"min eig(pinch(A,B)^{p} - pinch(A^{p},B)) >= 0",
                    eig_hermitian(difference).eigenvalues[-1],
                    0.0,
                    Direction.GEQ,
                    p,
                )
        t.check("F(A,B) = F(B,A)", fidelity(a, b), fidelity(b, a), Direction.EQ)
        t.check("tr pinch(A,B) = tr A", np.real(np.trace(pinched)), np.real(np.trace(a)), Direction.EQ)

    return _run(spec, trial)


def converse_bound(rho: DensityOperator, sigma: DensityOperator, alpha: AlphaLike) -> float:
    """α D_α(ρ‖σ) + log₂ tr ρ^α + (α-1) log₂ λ_min(σ), λ_min taken on the support of σ

    A lower bound on D̃_α(ρ‖σ) for α > 1; λ_min(σ) = ‖σ⁻¹‖⁻¹ with the inverse on the support.
    """
    alpha = AlphaParam.of(alpha)
    a = float(alpha)
    spectrum = eig_hermitian(sigma.op)
    smallest = float(spectrum.eigenvalues[spectrum.support].min())
    return a * d_old(rho, sigma, alpha) + math.log2(trace_power(rho.op, a)) + (a - 1) * math.log2(smallest)


def run_mosonyi(spec: SuiteSpec) -> VerificationReport:
    """D̃_α ≥ α D_α + log₂ tr ρ^α + (α-1) log₂ λ_min(σ) for α > 1"""
    _expect(spec, Suite.MOSONYI)

    def trial(t: _Trial, rng: np.random.Generator):
        rho, sigma = _single(t, rng)
        for alpha in spec.alpha_grid:
            t.check(
                f"d_sandwiched[{float(alpha)}] >= converse bound",
                d_sandwiched(rho, sigma, alpha),
                converse_bound(rho, sigma, alpha),
                Direction.GEQ,
                alpha,
            )

    return _run(spec, trial)


def run_divergence_ordering(spec: SuiteSpec) -> VerificationReport:
    """D_α ≥ D̃_α on the grid, D(ρ‖σ) ≥ 0 and D(ρ‖ρ) = 0"""
    _expect(spec, Suite.DIVERGENCE_ORDERING)

    def trial(t: _Trial, rng: np.random.Generator):
        rho, sigma = _single(t, rng)
        for alpha in spec.alpha_grid:
            t.check(
                f"d_old[{alpha}] >= d_sandwiched[{alpha}]",
                d_old(rho, sigma, alpha),
                d_sandwiched(rho, sigma, alpha),
                Direction.GEQ,
                alpha,
            )
        t.check("D(rho||sigma) >= 0", relative_entropy(rho, sigma), 0.0, Direction.GEQ, 1)
        t.check("D(rho||rho) = 0", relative_entropy(rho, rho), 0.0, Direction.EQ, 1)

    return _run(spec, trial)


def _measurements(spec: SuiteSpec, m: Povm | None, n: Povm | None) -> tuple[Povm, Povm]:
    """Explicit POVMs, else those of the spec, else computational and Fourier bases on A"""
    if m is None and n is None and spec.measurements is not None:
        m, n = spec.measurements
    dim = spec.dims[0]
    m = Povm.computational(dim) if m is None else m
    n = Povm.fourier(dim) if n is None else n
    if m.dim != dim or n.dim != dim:
        raise SuiteSpecError(f"measurements must act on dimension {dim} of the measured system")
    return m, n


def run_uncertainty(
    which: int, spec: SuiteSpec, m: Povm | None = None, n: Povm | None = None
) -> VerificationReport:
    """H_α(X|B) + H_β(Y|C) ≥ log₂(1/c) with M measured for X and N for Y on system A"""
    if which not in PAIRINGS:
        raise SuiteSpecError(f"unknown uncertainty relation {which!r}; expected 1, 2 or 3")
    _expect(spec, *(s for s, w in _UNCERTAINTY.items() if w == which))
    left, right = PAIRINGS[which]
    m, n = _measurements(spec, m, n)
    bound = -math.log2(overlap(m, n))

    def trial(t: _Trial, rng: np.random.Generator):
        xb, yc = post_measurement_states(_tripartite(t, rng), m, n)
        x_given_b = _Entropies(xb, "X", "B", spec.optimizer)
        y_given_c = _Entropies(yc, "Y", "C", spec.optimizer)
        for alpha in spec.alpha_grid:
            beta = dual_order(which, alpha)
            h1, h2 = x_given_b(left, alpha), y_given_c(right, beta)
            t.check(
                f"{_name(left, alpha, 'X', 'B')} + {_name(right, beta, 'Y', 'C')} >= log2(1/c)",
                h1.value + h2.value,
                bound,
                Direction.GEQ,
                alpha,
                beta,
                h1.converged and h2.converged,
            )

    return _run(spec, trial)


def run_maassen_uffink(spec: SuiteSpec, m: Povm | None = None, n: Povm | None = None) -> VerificationReport:
    """H_α(X) + H_β(Y) ≥ log₂(1/c) with 1/α + 1/β = 2 and no side information"""
    _expect(spec, Suite.MAASSEN_UFFINK)
    m, n = _measurements(spec, m, n)
    bound = -math.log2(overlap(m, n))

    def trial(t: _Trial, rng: np.random.Generator):
        psi = _tripartite(t, rng)
        x = post_measurement_state(psi, m, "A", (), "X")
        y = post_measurement_state(psi, n, "A", (), "Y")
        for alpha in spec.alpha_grid:
            beta = dual_order(2, alpha)
            t.check(
                f"H[{alpha}](X) + H[{beta}](Y) >= log2(1/c)",
                renyi_entropy(x, alpha) + renyi_entropy(y, beta),
                bound,
                Direction.GEQ,
                alpha,
                beta,
            )

    return _run(spec, trial)


def _support(p: np.ndarray) -> np.ndarray:
    return p > SUPPORT_CUTOFF * p.max()


def _log2_sum(values: np.ndarray) -> float:
    return math.log2(float(np.sum(values)))


def classical_down(p: npt.ArrayLike, alpha: AlphaLike) -> float:
    """H↓_α(X|Y) of a joint table p[x, y] by scalar formulas"""
    alpha = AlphaParam.of(alpha)
    p = np.asarray(p, dtype=float)
    py = np.broadcast_to(p.sum(axis=0), p.shape)
    mask = _support(p)
    a = float(alpha)
    if a == 0:
        return _log2_sum(py[mask])
    if a == 1:
        return -float(np.sum(p[mask] * np.log2(p[mask] / py[mask])))
    if math.isinf(a):
        return -math.log2(float(np.max(p[mask] / py[mask])))
    return _log2_sum(p[mask] ** a * py[mask] ** (1 - a)) / (1 - a)


def classical_up(p: npt.ArrayLike, alpha: AlphaLike) -> float:
    """H↑_α(X|Y) of a joint table p[x, y] (Arimoto's conditional entropy)"""
    alpha = AlphaParam.of(alpha)
    p = np.asarray(p, dtype=float)
    masked = np.where(_support(p), p, 0.0)
    a = float(alpha)
    if a == 0:
        return math.log2(int(np.max(np.count_nonzero(masked, axis=0))))
    if a == 1:
        return classical_down(p, alpha)
    if math.isinf(a):
        return -_log2_sum(masked.max(axis=0))
    inner = np.sum(masked**a, axis=0) ** (1 / a)
    return a / (1 - a) * _log2_sum(inner)


def run_classical_oracle(spec: SuiteSpec) -> VerificationReport:
    """All four entropies of diagonal states against the scalar formulas

    Sandwiched UP is compared for α ≥ 1/2 only; below that its zero-order limit counts the
    support of X rather than the largest conditional support.
    """
    _expect(spec, Suite.CLASSICAL_ORACLE)

    def trial(t: _Trial, rng: np.random.Generator):
        p = random_distribution(spec.dims, rng)
        if t.index % 2:
            p.flat[int(rng.integers(p.size))] = 0.0
            p /= p.sum()
        t.digest = digest(p)
        values = _Entropies(classical_state(p), "A", "B", spec.optimizer)
        for alpha in spec.alpha_grid:
            for kind in EntropyKind:
                if not _admits(kind, alpha):
                    continue
                result = values(kind, alpha)
                expected = classical_up(p, alpha) if kind.arrow is Arrow.UP else classical_down(p, alpha)
                t.check(
                    f"{_name(kind, alpha)} = scalar formula",
                    result.value,
                    expected,
                    Direction.EQ,
                    alpha,
                    converged=result.converged,
                )

    return _run(spec, trial)


def run_limits(spec: SuiteSpec) -> VerificationReport:
    """α → 1 limits, the collision entropy and the α-z specializations"""
    _expect(spec, Suite.LIMITS)
    above = AlphaParam.of(1 + BRACKET)
    below = AlphaParam.of(1 - BRACKET)

    def trial(t: _Trial, rng: np.random.Generator):
        rho = _bipartite(t, rng)
        values = _Entropies(rho, "A", "B", spec.optimizer)
        vn = conditional_von_neumann(rho, None, "A", "B")
        for kind in EntropyKind:
            one = values(kind, AlphaParam.ONE)
            high, low = values(kind, above), values(kind, below)
            t.check(f"{_name(kind, 1)} = H(A|B)", one.value, vn, Direction.EQ, 1)
            t.check(f"{_name(kind, above)} <= H(A|B)", high.value, vn, Direction.LEQ, above, converged=high.converged)
            t.check(f"H(A|B) <= {_name(kind, below)}", vn, low.value, Direction.LEQ, below, converged=low.converged)
            t.check(
                f"{_name(kind, above)} ~ {_name(kind, below)}",
                high.value,
                low.value,
                Direction.EQ,
                above,
                below,
                high.converged and low.converged,
                BRACKET_SPREAD,
            )
        t.check(
            f"collision(A|B) = {_name(EntropyKind.SANDWICHED_DOWN, 2)}",
            collision_entropy(rho, None, "A", "B"),
            h_down_sandwiched(rho, None, "A", "B", 2),
            Direction.EQ,
            2,
            tolerance=COLLISION_TOLERANCE,
        )
        sigma = random_density(rho.layout, None, rng)
        for a in (0.5, 2.0):
            t.check(
                f"d_alpha_z[{a}, z=1] = d_old[{a}]",
                d_alpha_z(rho, sigma, a, 1.0),
                d_old(rho, sigma, a),
                Direction.EQ,
                a,
            )
            t.check(
                f"d_alpha_z[{a}, z={a}] = d_sandwiched[{a}]",
                d_alpha_z(rho, sigma, a, a),
                d_sandwiched(rho, sigma, a),
                Direction.EQ,
                a,
            )

    return _run(spec, trial)


def run_isometry(spec: SuiteSpec) -> VerificationReport:
    """Entropies are unchanged by local isometries on A and on B"""
    _expect(spec, Suite.ISOMETRY)

    def trial(t: _Trial, rng: np.random.Generator):
        rho = _bipartite(t, rng)
        dim_a, dim_b = rho.layout.dims
        on_a = KrausChannel((haar_isometry(dim_a, dim_a + 1, rng),))
        on_b = KrausChannel((haar_isometry(dim_b, dim_b + 1, rng),))
        embedded = apply(on_b, apply(on_a, rho, "A"), "B")
        before = _Entropies(rho, "A", "B", spec.optimizer)
        after = _Entropies(embedded, "A", "B", spec.optimizer)
        for alpha in spec.alpha_grid:
            for kind in EntropyKind:
                if not _admits(kind, alpha):
                    continue
                h0, h1 = before(kind, alpha), after(kind, alpha)
                t.check(
                    f"{_name(kind, alpha)} under V_A ⊗ V_B",
                    h1.value,
                    h0.value,
                    Direction.EQ,
                    alpha,
                    converged=h0.converged and h1.converged,
                    tolerance=max(spec.tolerance, OPTIMIZER_TOLERANCE)
                    if kind is EntropyKind.SANDWICHED_UP
                    else None,
                )

    return _run(spec, trial)


def run_stinespring(spec: SuiteSpec) -> VerificationReport:
    """Data processing on B seen through the dual entropy on the complementary system

    A channel on B of a pure ρ_ABC is dilated to an isometry B → B E. H_α(A|B) can only grow
    while the dual H_β(A|C E) can only shrink, and the duality holds on the dilated state.
    Relations 1 and 3 are used, both admissible for α ∈ [1/2, 2].
    """
    _expect(spec, Suite.STINESPRING)

    def trial(t: _Trial, rng: np.random.Generator):
        psi = _tripartite(t, rng)
        dim_b = psi.layout.dims[1]
        channel = random_channel(dim_b, dim_b, dim_b, rng)
        dilated = psi.apply_isometry(channel.stinespring(), "B", dim_b, "E")
        t.digest = digest(psi.vector, channel.stinespring())
        rho, rho_out = psi.density(), dilated.density()
        ab = _Entropies(rho, "A", "B", spec.optimizer)
        ac = _Entropies(rho, "A", "C", spec.optimizer)
        ab_out = _Entropies(rho_out, "A", "B", spec.optimizer)
        ace_out = _Entropies(rho_out, "A", ("C", "E"), spec.optimizer)
        for which in (1, 3):
            left, right = PAIRINGS[which]
            for alpha in spec.alpha_grid:
                beta = dual_order(which, alpha)
                t.check(
                    f"{_name(left, alpha, 'A', 'B_out')} >= {_name(left, alpha)}",
                    ab_out(left, alpha).value,
                    ab(left, alpha).value,
                    Direction.GEQ,
                    alpha,
                )
                t.check(
                    f"{_name(right, beta, 'A', 'CE')} <= {_name(right, beta, 'A', 'C')}",
                    ace_out(right, beta).value,
                    ac(right, beta).value,
                    Direction.LEQ,
                    alpha,
                    beta,
                )
                t.check(
                    f"{_name(left, alpha, 'A', 'B_out')} + {_name(right, beta, 'A', 'CE')} = 0",
                    ab_out(left, alpha).value,
                    -ace_out(right, beta).value,
                    Direction.EQ,
                    alpha,
                    beta,
                )

    return _run(spec, trial)


def run_suite(spec: SuiteSpec) -> VerificationReport:
    """Run the suite named by the spec"""
    logger.debug(f"run_suite: {spec.suite.value}, dims={spec.dims}, trials={spec.trials}, seed={spec.seed}")
    match spec.suite:
        case Suite.DUALITY_1:
            return run_duality(1, spec)
        case Suite.DUALITY_2:
            return run_duality(2, spec)
        case Suite.DUALITY_3:
            return run_duality(3, spec)
        case Suite.ORDERING:
            return run_ordering(spec)
        case Suite.COROLLARY:
            return run_sandwich_corollary(spec)
        case Suite.MONOTONE_ALPHA:
            return run_monotone_alpha(spec)
        case Suite.DPI:
            return run_dpi(spec)
        case Suite.HOLDER:
            return run_holder(spec)
        case Suite.MOSONYI:
            return run_mosonyi(spec)
        case Suite.DIVERGENCE_ORDERING:
            return run_divergence_ordering(spec)
        case Suite.UNCERTAINTY_1 | Suite.UNCERTAINTY_2 | Suite.UNCERTAINTY_3:
            return run_uncertainty(_UNCERTAINTY[spec.suite], spec)
        case Suite.MAASSEN_UFFINK:
            return run_maassen_uffink(spec)
        case Suite.CLASSICAL_ORACLE:
            return run_classical_oracle(spec)
        case Suite.LIMITS:
            return run_limits(spec)
        case Suite.ISOMETRY:
            return run_isometry(spec)
        case Suite.STINESPRING:
            return run_stinespring(spec)
    raise SuiteSpecError(f"unknown suite {spec.suite!r}")
