"""The two-parameter Bayesian game G(kappa, tau) and its classical equilibria."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from nlgames.boxes import Box, deterministic_box

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GameParams:
    kappa: float
    tau: float

    def __post_init__(self):
        if not (self.kappa > 0 and self.tau > 0):
            raise ValueError(
                f"kappa and tau must be positive, got kappa={self.kappa}, tau={self.tau}"
            )


@dataclass(frozen=True, eq=False)
class UtilityTable:
    """Utilities ``u_A[x_A, x_B, y_A, y_B]``, ``u_B[...]`` and a prior over types."""

    u_A: np.ndarray
    u_B: np.ndarray
    prior: np.ndarray = field(default_factory=lambda: np.full((2, 2), 0.25))

    def __post_init__(self):
        u_a = np.asarray(self.u_A, dtype=float).reshape(2, 2, 2, 2)
        u_b = np.asarray(self.u_B, dtype=float).reshape(2, 2, 2, 2)
        prior = np.asarray(self.prior, dtype=float).reshape(2, 2)
        if prior.min() < 0 or abs(prior.sum() - 1.0) > 1e-12:
            raise ValueError(f"prior must be a probability distribution, got {prior.ravel()}")
        object.__setattr__(self, "u_A", u_a)
        object.__setattr__(self, "u_B", u_b)
        object.__setattr__(self, "prior", prior)

    def max_utility(self) -> float:
        return float(max(self.u_A.max(), self.u_B.max()))


@dataclass(frozen=True)
class PayoffPair:
    alice: float
    bob: float

    @property
    def total(self) -> float:
        return self.alice + self.bob

    def __iter__(self):
        yield self.alice
        yield self.bob


class PureStrategy(enum.Enum):
    """Maps from a type bit to an action bit; values are (g(0), g(1))."""

    CONST0 = (0, 0)
    CONST1 = (1, 1)
    IDENTITY = (0, 1)
    FLIP = (1, 0)

    def __call__(self, x: int) -> int:
        return self.value[x]

    @property
    def label(self) -> str:
        return f"g{_ORDER.index(self) + 1}"


# Order used for the g^1..g^4 labels and the payoff grid.
_ORDER = [PureStrategy.CONST0, PureStrategy.CONST1, PureStrategy.IDENTITY, PureStrategy.FLIP]
PURE_STRATEGIES: tuple[PureStrategy, ...] = tuple(_ORDER)


class Fairness(str, enum.Enum):
    FAIR = "Fair"
    UNFAIR_TO_A = "UnfairToA"
    UNFAIR_TO_B = "UnfairToB"


@dataclass(frozen=True)
class Equilibrium:
    alice: PureStrategy
    bob: PureStrategy
    payoffs: PayoffPair
    fairness: Fairness

    @property
    def label(self) -> str:
        return f"({self.alice.label}_A, {self.bob.label}_B)"


@dataclass(frozen=True)
class EquilibriumReport:
    equilibria: tuple[Equilibrium, ...]

    def __len__(self):
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)

    def pairs(self) -> set[tuple[PureStrategy, PureStrategy]]:
        return {(e.alice, e.bob) for e in self.equilibria}


def utility_from_params(params: GameParams) -> UtilityTable:
    k, t = params.kappa, params.tau
    u_a = np.zeros((2, 2, 2, 2))
    u_b = np.zeros((2, 2, 2, 2))
    for xa, xb in itertools.product((0, 1), repeat=2):
        if xa & xb == 0:
            u_a[xa, xb, 0, 0], u_b[xa, xb, 0, 0] = 1.0, k
            u_a[xa, xb, 1, 1], u_b[xa, xb, 1, 1] = 0.5, t
        else:
            for ya, yb in ((0, 1), (1, 0)):
                u_a[xa, xb, ya, yb] = u_b[xa, xb, ya, yb] = 0.75
    return UtilityTable(u_a, u_b)


def average_payoffs(table: UtilityTable, advice: Box) -> PayoffPair:
    """Expected utilities sum_{x,y} P(x) P(y|x) u_i(x, y)."""
    weights = table.prior[:, :, None, None] * advice.p
    return PayoffPair(float(np.sum(weights * table.u_A)), float(np.sum(weights * table.u_B)))


def pure_strategy_box(g_a: PureStrategy, g_b: PureStrategy) -> Box:
    return deterministic_box(g_a.value, g_b.value)


def pure_payoff_table(params: GameParams | UtilityTable) -> list[list[PayoffPair]]:
    """4x4 grid of payoffs, rows Alice's g1..g4, columns Bob's g1..g4."""
    table = utility_from_params(params) if isinstance(params, GameParams) else params
    return [
        [average_payoffs(table, pure_strategy_box(ga, gb)) for gb in PURE_STRATEGIES]
        for ga in PURE_STRATEGIES
    ]


def classify_fairness(p: PayoffPair, tol: float = DEFAULT_TOL) -> Fairness:
    if abs(p.alice - p.bob) <= tol:
        return Fairness.FAIR
    if p.alice > p.bob + tol:
        return Fairness.UNFAIR_TO_B
    return Fairness.UNFAIR_TO_A


def find_pure_nash(params: GameParams | UtilityTable, tol: float = DEFAULT_TOL) -> EquilibriumReport:
    """All pure-strategy profiles where no unilateral deviation gains more than ``tol``.

    Weak best responses are accepted, so ties at kappa = 3/4 are reported.
    """
    grid = pure_payoff_table(params)
    found = []
    for i, j in itertools.product(range(4), repeat=2):
        here = grid[i][j]
        best_a = max(grid[k][j].alice for k in range(4))
        best_b = max(grid[i][k].bob for k in range(4))
        if best_a - here.alice <= tol and best_b - here.bob <= tol:
            found.append(
                Equilibrium(PURE_STRATEGIES[i], PURE_STRATEGIES[j], here, classify_fairness(here, tol))
            )
    return EquilibriumReport(tuple(found))


@dataclass(frozen=True)
class Deviation:
    """A relabeling of one player's recommended action.

    ``mapping[x][y]`` is the action played on type x when advised action y.
    """

    player: str
    mapping: tuple[tuple[int, int], tuple[int, int]]
    gain: float


def _relabel(p: np.ndarray, player: str, mapping) -> np.ndarray:
    out = np.zeros_like(p)
    for x, y in itertools.product((0, 1), repeat=2):
        z = mapping[x][y]
        if player == "A":
            out[x, :, z, :] += p[x, :, y, :]
        else:
            out[:, x, :, z] += p[:, x, :, y]
    return out


def is_advice_equilibrium(
    table: UtilityTable, advice: Box, tol: float = DEFAULT_TOL
) -> tuple[bool, Deviation]:
    """Check that neither player gains by post-processing the advice.

    Tries all 16 maps (type, advised action) -> action for each player and
    returns the verdict together with the most profitable deviation found.
    """
    base = average_payoffs(table, advice)
    best: Deviation | None = None
    for player in ("A", "B"):
        for bits in itertools.product((0, 1), repeat=4):
            mapping = ((bits[0], bits[1]), (bits[2], bits[3]))
            moved = Box(_relabel(advice.p, player, mapping))
            pay = average_payoffs(table, moved)
            gain = pay.alice - base.alice if player == "A" else pay.bob - base.bob
            if best is None or gain > best.gain:
                best = Deviation(player, mapping, gain)
    return best.gain <= tol, best

