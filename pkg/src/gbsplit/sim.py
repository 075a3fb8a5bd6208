"""Instance generation and Monte-Carlo estimation.

Seeding: a 64-bit master seed feeds ``numpy.random.SeedSequence``, whose
``generate_state`` yields one 64-bit seed per trial.  Trial ``i`` draws its
pattern from ``numpy.random.default_rng(trial_seed[i])`` (PCG64).  The
per-trial seeds depend only on the master seed and the trial index, so
results do not depend on how trials are scheduled across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .driver import run_gbs, run_gbs_capped
from .errors import InvalidSpecError
from .splitting import DefectivePattern, is_power_of_two
from .theory import avg_aspect, mcdiarmid_bound

WORKERS_ENV = "GBSPLIT_WORKERS"

MODELS = ("iid", "fixed_k", "adversarial")


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    model: str = "iid"
    p: float | None = None
    k: int | None = None
    m: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidSpecError(f"unknown model {self.model!r}")
        if self.n < 0:
            raise InvalidSpecError(f"n must be >= 0, got {self.n}")
        if self.model == "iid":
            if self.p is None or not 0 <= self.p <= 1:
                raise InvalidSpecError(f"iid model needs 0 <= p <= 1, got {self.p}")
            return
        if self.k is None or not 0 <= self.k <= self.n:
            raise InvalidSpecError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.model == "adversarial":
            if self.m is None or not is_power_of_two(self.m):
                raise InvalidSpecError(f"adversarial model needs a power-of-2 m, got {self.m}")
            if (self.n - self.k) % self.m:
                raise InvalidSpecError(f"adversarial model needs m | n-k (m={self.m}, n-k={self.n - self.k})")

    @classmethod
    def iid(cls, n, p, seed=0):
        return cls(n, "iid", p=p, seed=seed)

    @classmethod
    def fixed_k(cls, n, k, seed=0):
        return cls(n, "fixed_k", k=k, seed=seed)

    @classmethod
    def adversarial(cls, n, k, m, seed=0):
        return cls(n, "adversarial", k=k, m=m, seed=seed)

    @property
    def density(self) -> float:
        """Defective fraction used to size budgets: ``p``, or ``k / n``."""
        if self.model == "iid":
            return self.p
        return self.k / self.n if self.n else 0.0


def generate(spec: InstanceSpec) -> DefectivePattern:
    """Draw a pattern; the adversarial model ignores the seed."""
    n = spec.n
    if spec.model == "adversarial":
        bits = np.zeros(n, dtype=bool)
        bits[: spec.k] = True
        return DefectivePattern(bits)
    rng = np.random.default_rng(spec.seed)
    if spec.model == "iid":
        return DefectivePattern(rng.random(n) < spec.p)
    bits = np.zeros(n, dtype=bool)
    bits[rng.choice(n, size=spec.k, replace=False)] = True
    return DefectivePattern(bits)


def trial_seeds(seed: int, trials: int) -> list[int]:
    state = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    return [int(s) for s in state]


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    seed: int
    tests: int
    success: bool


@dataclass(frozen=True)
class RunStats:
    trials: int
    n: int
    mean_tests_per_item: float
    stddev: float
    error_rate: float
    tests: tuple[int, ...]
    budget: int | None = None

    def tail_freq(self, delta: float) -> float:
        """Fraction of trials with ``|T - mean T| > delta * mean T``."""
        t = np.asarray(self.tests, dtype=float)
        mean = t.mean()
        return float(np.mean(np.abs(t - mean) > delta * mean))


def capped_budget(spec: InstanceSpec, m: int, budget_factor: float) -> int:
    return math.ceil(budget_factor * avg_aspect(spec.density, m) * spec.n)


def _run_trials(args) -> list[TrialOutcome]:
    spec, m, budget, indexed_seeds = args
    out = []
    for trial, seed in indexed_seeds:
        pattern = generate(replace(spec, seed=seed))
        if budget is None:
            res = run_gbs(pattern, m, record=False)
        else:
            res = run_gbs_capped(pattern, m, budget, record=False)
        out.append(TrialOutcome(trial, seed, res.tests_used, res.success))
    return out


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def run_trials(spec: InstanceSpec, m: int, trials: int, budget: int | None = None,
               workers: int | None = None) -> list[TrialOutcome]:
    """Run ``trials`` seeded instances; outcomes come back in trial order."""
    if trials < 1:
        raise InvalidSpecError(f"trials must be >= 1, got {trials}")
    indexed = list(enumerate(trial_seeds(spec.seed, trials)))
    workers = workers or default_workers()
    if workers == 1:
        return _run_trials((spec, m, budget, indexed))
    chunks = [indexed[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        parts = pool.map(_run_trials, [(spec, m, budget, c) for c in chunks if c])
    return sorted((o for part in parts for o in part), key=lambda o: o.trial)


def summarize(outcomes: list[TrialOutcome], n: int, budget: int | None = None) -> RunStats:
    tests = np.array([o.tests for o in outcomes], dtype=float)
    per_item = tests / n if n else np.zeros_like(tests)
    return RunStats(
        trials=len(outcomes),
        n=n,
        mean_tests_per_item=float(per_item.mean()),
        stddev=float(per_item.std(ddof=1)) if len(outcomes) > 1 else 0.0,
        error_rate=float(np.mean([not o.success for o in outcomes])),
        tests=tuple(o.tests for o in outcomes),
        budget=budget,
    )


def monte_carlo(spec: InstanceSpec, m: int, trials: int, mode: str = "plain",
                budget_factor: float = 1.05, workers: int | None = None) -> RunStats:
    """Aggregate ``trials`` runs of the plain or capped algorithm.

    Capped runs get ``ceil(budget_factor * avg_aspect(p, m) * n)`` tests.
    """
    if mode == "plain":
        budget = None
    elif mode == "capped":
        budget = capped_budget(spec, m, budget_factor)
    else:
        raise InvalidSpecError(f"unknown mode {mode!r}")
    outcomes = run_trials(spec, m, trials, budget, workers)
    return summarize(outcomes, spec.n, budget)


@dataclass(frozen=True)
class ConcentrationRow:
    n: int
    mean_tests: float
    tail_freq: float
    bound: float
    error_rate: float | None = None


def concentration_experiment(p: float, m: int, n_grid, delta: float, trials: int, seed: int = 0,
                             capped: bool = False, workers: int | None = None) -> list[ConcentrationRow]:
    """Empirical tail of the test count against the McDiarmid bound, per ``n``.

    The tail is measured around the empirical mean.  With ``capped=True``
    a second batch of runs (same seeds) measures the error rate of the
    capped algorithm at budget ``(1 + delta) * avg_aspect(p, m) * n``.
    """
    rows = []
    for n in n_grid:
        if n < m:
            raise InvalidSpecError(f"grid point n={n} is smaller than m={m}")
        spec = InstanceSpec.iid(n, p, seed)
        stats = monte_carlo(spec, m, trials, workers=workers)
        err = None
        if capped:
            err = monte_carlo(spec, m, trials, "capped", 1 + delta, workers).error_rate
        rows.append(ConcentrationRow(n, stats.mean_tests_per_item * n, stats.tail_freq(delta),
                                     mcdiarmid_bound(n, m, delta, p), err))
    return rows
