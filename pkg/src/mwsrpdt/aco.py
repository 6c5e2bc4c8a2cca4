"""Ant System, Max-Min Ant System and Ant Colony System over the constructive heuristic."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernel
from ._kernel import _pykernel
from .constructive import Candidate, ComponentKey, solution_from_kernel
from .core import DEPOT, Instance, Solution, fractional_objective
from .exceptions import DegenerateWeights, InvalidConfig

VARIANTS = ("AS", "MMAS", "ACS")
ENCODINGS = ("ct1", "ct2", "ct3", "ct4")


@dataclass(frozen=True)
class AcoParams:
    variant: str = "MMAS"
    encoding: str = "ct3"
    alpha: float = 1.0
    beta: float = 1.0
    rho: float = 0.1
    Q: float = 1.0
    tau0: float = 1.0
    tau_min: float = 0.01
    tau_max: float = 10.0
    phi: float = 0.1
    q0: float = 0.9
    num_ants: int = 100
    max_iter: int = 100
    seed: int = 0
    global_best: bool = False

    def validate(self) -> "AcoParams":
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.encoding not in ENCODINGS:
            raise InvalidConfig(f"encoding must be one of {ENCODINGS}, got {self.encoding!r}")
        if self.alpha < 0 or self.beta < 0:
            raise InvalidConfig("alpha and beta must be >= 0")
        for name in ("rho", "phi", "q0"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1]")
        if not (self.Q > 0 and self.tau0 > 0):
            raise InvalidConfig("Q and tau0 must be > 0")
        if self.variant == "MMAS" and not 0 < self.tau_min <= self.tau_max:
            raise InvalidConfig("MMAS needs 0 < tau_min <= tau_max")
        if self.num_ants < 1 or self.max_iter < 1:
            raise InvalidConfig("num_ants and max_iter must be positive")
        if self.seed < 0:
            raise InvalidConfig("seed must be non-negative")
        return self


# Tuned settings for each variant.
DEFAULTS: Dict[str, AcoParams] = {
    "AS": AcoParams(variant="AS", encoding="ct2", alpha=5.97, beta=1.39, rho=0.48,
                    Q=4.08, tau0=9.99),
    "MMAS": AcoParams(variant="MMAS", encoding="ct3", alpha=6.47, beta=5.78, rho=0.02,
                      Q=9.96, tau0=8.88, tau_min=0.02, tau_max=5.69),
    "ACS": AcoParams(variant="ACS", encoding="ct2", alpha=9.29, beta=0.53, rho=0.82,
                     Q=8.91, tau0=7.28, phi=0.12, q0=0.91),
}


def default_params(variant: str, **overrides) -> AcoParams:
    variant = variant.upper()
    if variant not in DEFAULTS:
        raise InvalidConfig(f"variant must be one of {VARIANTS}, got {variant!r}")
    return replace(DEFAULTS[variant], **overrides).validate()


class PheromoneTable:
    """Sparse pheromone store.

    Keys never written hold a shared ``default`` trail, which starts at
    ``tau0`` and goes through the same evaporation and clamping as stored
    keys, so the table behaves exactly like a dense one.
    """

    def __init__(self, tau0: float):
        self.tau0 = float(tau0)
        self.default = float(tau0)
        self.values: Dict[Hashable, float] = {}

    def __getitem__(self, key) -> float:
        return self.values.get(key, self.default)

    def get(self, key, default=None) -> float:
        return self.values.get(key, self.default if default is None else default)

    def __setitem__(self, key, value: float):
        self.values[key] = float(value)

    def __contains__(self, key) -> bool:
        return key in self.values

    def __len__(self) -> int:
        return len(self.values)

    def evaporate(self, rho: float):
        keep = 1.0 - rho
        vals = self.values
        for key in vals:
            vals[key] = keep * vals[key]
        self.default = keep * self.default

    def clamp(self, tau_min: float, tau_max: float):
        vals = self.values
        for key, t in vals.items():
            vals[key] = mmas_clamp(t, tau_min, tau_max)
        self.default = mmas_clamp(self.default, tau_min, tau_max)


def heuristic_value(candidate: Candidate) -> float:
    """Attractiveness of a candidate: the reciprocal of its completion moment."""
    return 1.0 / candidate.end


def selection_probabilities(candidates: Sequence[Candidate], pheromones, alpha: float,
                            beta: float) -> List[float]:
    taus = [pheromones[c.component] for c in candidates]
    ends = [c.end for c in candidates]
    weights = _pykernel.proportional_weights(taus, ends, alpha, beta)
    total = sum(weights)
    if not (total > 0.0) or total == float("inf"):
        warnings.warn("all selection weights vanished; using uniform probabilities",
                      DegenerateWeights, stacklevel=2)
        return [1.0 / len(candidates)] * len(candidates)
    return [w / total for w in weights]


def select_probabilistic(candidates: Sequence[Candidate], pheromones, alpha: float,
                         beta: float, rng) -> Candidate:
    """Roulette-wheel draw with weights tau^alpha * eta^beta."""
    if not candidates:
        raise ValueError("no candidates")
    taus = [pheromones[c.component] for c in candidates]
    ends = [c.end for c in candidates]
    weights = _pykernel.proportional_weights(taus, ends, alpha, beta)
    u = float(rng.random())
    idx = _pykernel.roulette(weights, u)
    if idx < 0:
        warnings.warn("all selection weights vanished; drawing uniformly",
                      DegenerateWeights, stacklevel=2)
        idx = min(int(u * len(candidates)), len(candidates) - 1)
    return candidates[idx]


def _component_order(key: ComponentKey):
    def vert(v):
        if v is None:
            return (-1, -1)
        return (0, 0) if v is DEPOT else (v.customer, v.task)

    return (key.encoding, -1 if key.day is None else key.day,
            -1 if key.team is None else key.team, vert(key.frm), vert(key.to))


def select_pseudorandom(candidates: Sequence[Candidate], pheromones, beta: float, q0: float,
                        rng, alpha: float = 1.0) -> Candidate:
    """Ant Colony System rule.

    With probability ``q0`` take the candidate maximizing tau * eta^beta
    (ties broken by component order); otherwise fall back to
    :func:`select_probabilistic` with exponent ``alpha``.
    """
    if not candidates:
        raise ValueError("no candidates")
    q = float(rng.random())
    if q < q0:
        return max(sorted(candidates, key=lambda c: _component_order(c.component)),
                   key=lambda c: pheromones[c.component] * _pykernel._pow(heuristic_value(c), beta))
    return select_probabilistic(candidates, pheromones, alpha, beta, rng)


def offline_update(pheromones: PheromoneTable, update_set: Iterable[Tuple[float, Iterable]],
                   rho: float, Q: float) -> None:
    """Evaporate every trail, then deposit ``Q / f'`` once per solution using a component.

    ``update_set`` holds ``(fprime, components)`` pairs.
    """
    pheromones.evaporate(rho)
    vals = pheromones.values
    base = pheromones.default
    for fprime, comps in update_set:
        deposit = Q / fprime
        for key in set(comps):
            vals[key] = vals.get(key, base) + deposit


def mmas_clamp(tau: float, tau_min: float, tau_max: float) -> float:
    return min(max(tau, tau_min), tau_max)


def local_update(pheromones: PheromoneTable, key, phi: float, tau0: float) -> None:
    pheromones[key] = (1.0 - phi) * pheromones[key] + phi * tau0


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    iter_p: int
    iter_fprime: float
    best_p: int
    best_fprime: float


@dataclass
class AcoResult:
    best: Solution
    best_fprime: float
    history: List[IterationRecord] = field(default_factory=list)
    iterations: int = 0
    seconds: float = 0.0


def ant_uniforms(seed: int, iteration: int, ant: int, size: int) -> np.ndarray:
    """Independent uniform stream for one ant, keyed by (seed, iteration, ant)."""
    ss = np.random.SeedSequence([int(seed), int(iteration), int(ant)])
    return np.random.Generator(np.random.PCG64(ss)).random(size)


def _objective(visits, D) -> Tuple[int, float]:
    p = 0
    for v in visits:
        if v[1] > p:
            p = v[1]
    m = 0.0
    for v in visits:
        if v[1] == p and v[4] > m:
            m = v[4]
    return p, fractional_objective(p, m, D)


def run(inst: Instance, params: AcoParams, max_iter: Optional[int] = None,
        time_limit: Optional[float] = None, backend: Optional[str] = None,
        pheromones: Optional[PheromoneTable] = None) -> AcoResult:
    """Run one ACO variant and return the best solution found plus its history.

    ``max_iter`` overrides ``params.max_iter``; ``time_limit`` (seconds) stops
    after the iteration during which it expires.
    """
    params.validate()
    iters = params.max_iter if max_iter is None else int(max_iter)
    fp = _kernel.FlatProblem(inst)
    table = pheromones if pheromones is not None else PheromoneTable(params.tau0)
    enc = _kernel.ENCODINGS[params.encoding]
    variant = params.variant
    mode = _kernel.PSEUDORANDOM if variant == "ACS" else _kernel.PROPORTIONAL
    local = variant == "ACS"
    n_uniform = 2 * fp.T + 2

    t0 = time.monotonic()
    best = None
    history: List[IterationRecord] = []
    done_iters = 0
    for it in range(iters):
        ants = []
        for a in range(params.num_ants):
            u = ant_uniforms(params.seed, it, a, n_uniform)
            visits, comps = _kernel.simulate(
                fp, mode, u, table.values, table.default, enc, params.alpha, params.beta,
                params.q0, params.phi, params.tau0, local, backend=backend)
            p, fprime = _objective(visits, fp.D)
            ants.append((fprime, p, visits, comps))

        it_best = ants[0]
        for ant in ants[1:]:
            if ant[0] < it_best[0]:
                it_best = ant
        if best is None or it_best[0] < best[0]:
            best = it_best

        if variant == "AS":
            offline_update(table, [(a[0], a[3]) for a in ants], params.rho, params.Q)
        else:
            depositor = best if (variant == "MMAS" and params.global_best) else it_best
            offline_update(table, [(depositor[0], depositor[3])], params.rho, params.Q)
            if variant == "MMAS":
                table.clamp(params.tau_min, params.tau_max)

        history.append(IterationRecord(it + 1, it_best[1], it_best[0], best[1], best[0]))
        done_iters = it + 1
        if time_limit is not None and time.monotonic() - t0 >= time_limit:
            break

    sol = solution_from_kernel(fp, best[2], best[3], params.encoding)
    return AcoResult(sol, best[0], history, done_iters, time.monotonic() - t0)
