"""Multistart derivative-free maximization over measurement angles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    seed: int = 0
    fatol: float = 1e-8
    xatol: float = 1e-7
    max_evaluations: int = 4000  # per restart

    def __post_init__(self):
        if self.restarts < 1 or self.max_evaluations < 1:
            raise ValueError("search budget must be positive")


@dataclass
class OptimizationResult:
    best_params: np.ndarray
    best_value: float
    payoffs: object
    evaluations: int
    converged: bool
    candidates: list = field(default_factory=list, repr=False)


@dataclass
class Candidate:
    params: np.ndarray
    value: float
    converged: bool
    restart: int


def random_angles(rng: np.random.Generator, n_dirs: int) -> np.ndarray:
    """Uniformly random points on the sphere, as (theta, phi) pairs."""
    z = rng.uniform(-1.0, 1.0, size=n_dirs)
    phi = rng.uniform(-math.pi, math.pi, size=n_dirs)
    return np.column_stack([np.arccos(z), phi]).reshape(-1)


def multistart_maximize(
    objective: Callable[[np.ndarray], float],
    n_dirs: int,
    config: SearchConfig,
    starts: Sequence[np.ndarray] = (),
) -> tuple[list[Candidate], int]:
    """Nelder-Mead from each start, then from ``config.restarts`` random points.

    Candidates come back in start order so the reduction is schedule-independent.
    """
    rng = np.random.default_rng(config.seed)
    x0s = [np.asarray(s, dtype=float) for s in starts]
    x0s += [random_angles(rng, n_dirs) for _ in range(config.restarts)]
    evaluations = 0
    out = []
    for k, x0 in enumerate(x0s):
        res = minimize(
            lambda x: -objective(x),
            x0,
            method="Nelder-Mead",
            options={
                "fatol": config.fatol,
                "xatol": config.xatol,
                "maxfev": config.max_evaluations,
                "adaptive": True,
            },
        )
        evaluations += int(res.nfev)
        out.append(Candidate(np.asarray(res.x), float(-res.fun), bool(res.success), k))
    return out, evaluations


def best_candidate(candidates: list[Candidate]) -> Candidate:
    # max() keeps the first of equal values, i.e. the lowest restart index
    return max(candidates, key=lambda c: c.value)
