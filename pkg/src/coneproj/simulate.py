"""Monte Carlo estimates of chi-bar-squared mixing weights.

Standard Gaussian vectors are projected onto the convexity cone and the
number ``k`` of active constraints is tallied.  Under the null hypothesis
of an affine mean, the likelihood-ratio statistic is a mixture of
chi-squared laws indexed by ``k``, with mixing weights ``P(k active)``.

Random streams
--------------
Trial ``t`` of a run seeded with ``seed`` draws its vector from a Philox
generator keyed by ``SeedSequence(seed, spawn_key=(t,))``.  The draw for a
trial therefore depends only on ``(seed, t)``, never on how trials are
split across workers.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constraints import build_equispaced, build_general
from .errors import EngineUnavailable, InvalidConfig
from .oracle import MAX_CONSTRAINTS, oracle_project
from .solver import SolverConfig, Status, solve

log = logging.getLogger(__name__)

ENGINES = ("solver", "oracle", "both")
MISMATCH_TOL = 1e-7


@dataclass(frozen=True)
class SimulationPlan:
    n: int
    trials: int
    seed: int = 0
    engine: str = "solver"
    workers: int = 1
    x: tuple | None = None  # general abscissae; equispaced when None
    solver_config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfig(f"trials must be at least 1, got {self.trials}")
        if self.n < 3:
            raise InvalidConfig(f"n must be at least 3, got {self.n}")
        if self.engine not in ENGINES:
            raise InvalidConfig(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.workers < 1:
            raise InvalidConfig(f"workers must be at least 1, got {self.workers}")
        if self.x is not None and len(self.x) != self.n:
            raise InvalidConfig(f"x has {len(self.x)} entries, n is {self.n}")
        if self.engine != "solver" and self.n - 2 > MAX_CONSTRAINTS:
            raise EngineUnavailable(
                f"oracle engine needs n - 2 <= {MAX_CONSTRAINTS}, got n = {self.n}"
            )

    def constraints(self):
        if self.x is None:
            return build_equispaced(self.n)
        return build_general(self.x)


@dataclass
class WeightEstimate:
    counts: np.ndarray
    trials: int
    disagreements: int | None = None
    unclean: int = 0  # solver exits other than AlreadyConvex/ViolationCleared

    @property
    def weights(self):
        return self.counts / self.trials

    @property
    def std_errors(self):
        w = self.weights
        return np.sqrt(w * (1.0 - w) / self.trials)

    def to_dict(self):
        return {
            "counts": self.counts.tolist(),
            "weights": self.weights.tolist(),
            "std_errors": self.std_errors.tolist(),
            "disagreements": self.disagreements,
            "unclean": self.unclean,
        }


def draw(seed, trial, n):
    """The standard Gaussian vector of trial ``trial``."""
    ss = np.random.SeedSequence(seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(ss)).standard_normal(n)


def _mismatch(phi, res, y_o, cert):
    tol = MISMATCH_TOL * max(1.0, float(np.max(np.abs(phi))))
    return res.J != cert.J_star or float(np.max(np.abs(res.y - y_o))) > tol


def _run_chunk(plan, start, stop):
    """Tally trials ``start <= t < stop``; returns counts per engine, the
    unclean count and the list of disagreeing trial indices."""
    A = plan.constraints()
    m = A.m
    solver_counts = np.zeros(m + 1, dtype=np.int64)
    oracle_counts = np.zeros(m + 1, dtype=np.int64)
    unclean = 0
    mismatches = []
    use_solver = plan.engine in ("solver", "both")
    use_oracle = plan.engine in ("oracle", "both")
    for t in range(start, stop):
        phi = draw(plan.seed, t, plan.n)
        if use_solver:
            res = solve(phi, A, plan.solver_config)
            solver_counts[res.k] += 1
            unclean += not res.status.clean
        if use_oracle:
            y_o, cert = oracle_project(phi, A)
            oracle_counts[len(cert.J_star)] += 1
        if use_solver and use_oracle and _mismatch(phi, res, y_o, cert):
            mismatches.append(t)
    return solver_counts, oracle_counts, unclean, mismatches


def _chunks(trials, workers):
    # fixed chunking keyed on trial index; results do not depend on it
    size = max(1, -(-trials // (4 * workers)))
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def _run(plan):
    m = plan.n - 2
    solver_counts = np.zeros(m + 1, dtype=np.int64)
    oracle_counts = np.zeros(m + 1, dtype=np.int64)
    unclean = 0
    mismatches = []
    if plan.workers == 1:
        parts = [_run_chunk(plan, 0, plan.trials)]
    else:
        chunks = _chunks(plan.trials, plan.workers)
        with ProcessPoolExecutor(max_workers=plan.workers) as ex:
            parts = list(ex.map(_run_chunk, [plan] * len(chunks), *zip(*chunks)))
    for sc, oc, u, mm in parts:
        solver_counts += sc
        oracle_counts += oc
        unclean += u
        mismatches.extend(mm)
    mismatches.sort()
    return solver_counts, oracle_counts, unclean, mismatches


def simulate_weights(plan: SimulationPlan) -> WeightEstimate:
    """Estimate the distribution of the number of active constraints.

    With ``engine="both"`` the solver tallies are returned and
    ``disagreements`` counts trials where the two engines differ.
    """
    solver_counts, oracle_counts, unclean, mismatches = _run(plan)
    if plan.engine == "oracle":
        return WeightEstimate(oracle_counts, plan.trials)
    est = WeightEstimate(solver_counts, plan.trials, unclean=unclean)
    if plan.engine == "both":
        est.disagreements = len(mismatches)
    if unclean:
        log.warning("%d of %d solves ended without clearing the violation", unclean, plan.trials)
    return est


@dataclass
class EngineComparison:
    solver: WeightEstimate
    oracle: WeightEstimate
    disagreements: list  # trial indices; reproduce with draw(seed, t, n)
    seed: int

    @property
    def max_weight_gap(self):
        return float(np.max(np.abs(self.solver.weights - self.oracle.weights)))

    def combined_std_errors(self):
        return np.sqrt(self.solver.std_errors ** 2 + self.oracle.std_errors ** 2)

    def to_dict(self):
        return {
            "max_weight_gap": self.max_weight_gap,
            "combined_std_errors": self.combined_std_errors().tolist(),
            "disagreements": [{"seed": self.seed, "trial": t} for t in self.disagreements],
        }


def compare_engines(plan: SimulationPlan) -> EngineComparison:
    """Run solver and oracle on the same draws and list every disagreement."""
    if plan.n - 2 > MAX_CONSTRAINTS:
        raise EngineUnavailable(f"oracle engine needs n - 2 <= {MAX_CONSTRAINTS}, got n = {plan.n}")
    solver_counts, oracle_counts, unclean, mismatches = _run(
        SimulationPlan(plan.n, plan.trials, plan.seed, "both", plan.workers, plan.x, plan.solver_config)
    )
    solver = WeightEstimate(solver_counts, plan.trials, len(mismatches), unclean)
    oracle = WeightEstimate(oracle_counts, plan.trials)
    return EngineComparison(solver, oracle, mismatches, plan.seed)


def compare_draws(phis, A, cfg=None):
    """Indices of rows of ``phis`` where solver and oracle disagree."""
    out = []
    for t, phi in enumerate(np.atleast_2d(phis)):
        res = solve(phi, A, cfg)
        y_o, cert = oracle_project(phi, A)
        if _mismatch(phi, res, y_o, cert):
            out.append(t)
    return out
