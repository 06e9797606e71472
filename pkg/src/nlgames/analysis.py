"""Advantage predicates, POVM feasibility scan and quantum strategy searches."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from nlgames.boxes import Box, CanonicalBox, canonical_from_box, chsh, k_statistic
from nlgames.game import (
    Fairness,
    GameParams,
    PayoffPair,
    UtilityTable,
    find_pure_nash,
    utility_from_params,
)
from nlgames.quantum import (
    MeasDirection,
    POVMParams,
    QuantumStrategy,
    TwoQubitState,
    born_probabilities,
    box_from_strategy,
    chsh_max_pure,
    effects_from_angles,
    gisin_settings,
    pure_state,
    singlet_chsh_strategy,
    werner,
)
from nlgames.search import (
    OptimizationResult,
    SearchConfig,
    best_candidate,
    multistart_maximize,
)

PKLSZDK = GameParams(0.5, 1.0)
FAIR_EQ = PayoffPair(9 / 16, 9 / 16)
UNFAIR_TO_B_EQ = PayoffPair(11 / 16, 7 / 16)
UNFAIR_TO_A_EQ = PayoffPair(7 / 16, 11 / 16)
K_FAIR_TOL = 1e-9
SQRT2 = math.sqrt(2.0)


def _canonical(c: CanonicalBox | Box) -> CanonicalBox:
    return canonical_from_box(c) if isinstance(c, Box) else c


# --- advantage predicates --------------------------------------------------


@dataclass(frozen=True)
class FairAdvantage:
    advantageous: bool
    payoff: float
    chsh: float
    k: float


def fair_advantage(c: CanonicalBox | Box) -> FairAdvantage:
    """Fair advice (K = 3) beats the 9/16 fair equilibrium of G(1/2, 1) iff B > 2."""
    c = _canonical(c)
    bell, k = chsh(c), k_statistic(c)
    fair = abs(k - 3.0) <= K_FAIR_TOL
    return FairAdvantage(fair and bell > 2.0, 3.0 / 8.0 * (1.0 + bell / 4.0), bell, k)


@dataclass(frozen=True)
class AdvantageVerdict:
    beats_fair: bool
    beats_unfair_to_B: bool
    beats_unfair_to_A: bool
    margins: dict = field(default_factory=dict)


def unfair_advantage(c: CanonicalBox | Box) -> AdvantageVerdict:
    """Advantage flags for G(1/2, 1) from B and K alone.

    Over (11/16, 7/16): 3B/2 + K > 8 and 3B/2 - K > -2.  The mirror equilibrium
    (7/16, 11/16) needs 3B/2 + K > 4 and 3B/2 - K > 2.
    """
    c = _canonical(c)
    bell, k = chsh(c), k_statistic(c)
    fa = (3.0 + 1.5 * bell + k) / 16.0
    fb = (9.0 + 1.5 * bell - k) / 16.0
    margins = {
        "fair": (fa - FAIR_EQ.alice, fb - FAIR_EQ.bob),
        "unfair_to_B": (fa - UNFAIR_TO_B_EQ.alice, fb - UNFAIR_TO_B_EQ.bob),
        "unfair_to_A": (fa - UNFAIR_TO_A_EQ.alice, fb - UNFAIR_TO_A_EQ.bob),
    }
    return AdvantageVerdict(
        beats_fair=1.5 * bell + k > 6.0 and 1.5 * bell - k > 0.0,
        beats_unfair_to_B=1.5 * bell + k > 8.0 and 1.5 * bell - k > -2.0,
        beats_unfair_to_A=1.5 * bell + k > 4.0 and 1.5 * bell - k > 2.0,
        margins=margins,
    )


def advantage_over_equilibria(payoffs: PayoffPair, params: GameParams | UtilityTable) -> AdvantageVerdict:
    """Compare payoffs against every pure Nash equilibrium of a game.

    A category flag is set when the payoffs strictly beat every equilibrium of
    that fairness class for both players; an empty class gives False.
    """
    report = find_pure_nash(params)
    margins = {}
    beaten = {f: [] for f in Fairness}
    for eq in report:
        m = (payoffs.alice - eq.payoffs.alice, payoffs.bob - eq.payoffs.bob)
        margins[eq.label] = m
        beaten[eq.fairness].append(m[0] > 0 and m[1] > 0)
    return AdvantageVerdict(
        beats_fair=bool(beaten[Fairness.FAIR]) and all(beaten[Fairness.FAIR]),
        beats_unfair_to_B=bool(beaten[Fairness.UNFAIR_TO_B]) and all(beaten[Fairness.UNFAIR_TO_B]),
        beats_unfair_to_A=bool(beaten[Fairness.UNFAIR_TO_A]) and all(beaten[Fairness.UNFAIR_TO_A]),
        margins=margins,
    )


# --- singlet + two-outcome POVM ----------------------------------------------


def povm_chsh_and_k(alpha, mu, bs):
    """B = 2(alpha - 1)^2 + mu^2 B_S and K = 3 alpha for the singlet."""
    return 2.0 * (alpha - 1.0) ** 2 + mu**2 * bs, 3.0 * alpha


def povm_margins(alpha, mu, bs):
    """Raw margins (3B/2 + K - 8, 3B/2 - K + 2); both must be positive."""
    bell, k = povm_chsh_and_k(alpha, mu, bs)
    return 1.5 * bell + k - 8.0, 1.5 * bell - k + 2.0


def povm_conditions(alpha: float, mu: float, bs: float) -> tuple[float, float]:
    """Normalized ellipse/hyperbola forms; each condition holds iff its value exceeds 1.

    At B_S = 0 the normalization is undefined and the raw margins are mapped
    onto the same "> 1" scale instead.
    """
    if abs(bs) > 2 * SQRT2 + 1e-12:
        raise ValueError(f"|B_S| must not exceed 2 sqrt(2), got {bs}")
    if bs == 0.0:
        m8, m9 = povm_margins(alpha, mu, 0.0)
        return 1.0 + m8 / (23.0 / 4.0), 1.0 + m9 / (7.0 / 4.0)
    lhs1 = (alpha - 0.5) ** 2 / (23.0 / 12.0) + mu**2 / (23.0 / (6.0 * bs))
    lhs2 = (alpha - 1.5) ** 2 / (7.0 / 12.0) + mu**2 / (7.0 / (6.0 * bs))
    return lhs1, lhs2


@dataclass
class ScanResult:
    grid: dict
    feasible_points: list
    max_min_margin: float
    argmax: tuple

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "max_min_margin": self.max_min_margin,
            "argmax": list(self.argmax),
            "feasible_points": [list(p) for p in self.feasible_points],
        }


def povm_singlet_scan(
    alpha_step: float = 1e-3,
    mu_step: float = 1e-3,
    bs_step: float = 1e-2,
    alpha_max: float = 2.0,
    bs_values: Iterable[float] | None = None,
    admissible: bool = True,
    max_points: int = 1000,
) -> ScanResult:
    """Grid search for (alpha, mu, B_S) meeting both unfair-advantage conditions.

    alpha runs over (0, alpha_max], mu over [0, mu_max(alpha)] with
    mu_max = max(0, min(alpha, 2 - alpha)) when ``admissible`` (else [0, 2]),
    and B_S over [-2 sqrt 2, 2 sqrt 2] including both endpoints.  At most
    ``max_points`` feasible points are stored; ``grid["n_feasible"]`` counts all.
    """
    if min(alpha_step, mu_step, bs_step) <= 0:
        raise ValueError("grid steps must be positive")
    n_alpha = int(round(alpha_max / alpha_step))
    alphas = alpha_step * np.arange(1, n_alpha + 1)
    mu_top = 1.0 if admissible else 2.0
    mus = mu_step * np.arange(0, int(round(mu_top / mu_step)) + 1)
    if bs_values is None:
        bound = 2 * SQRT2
        nb = int(math.floor(bound / bs_step))
        bs_grid = np.concatenate([[-bound], bs_step * np.arange(-nb, nb + 1), [bound]])
    else:
        bs_grid = np.asarray(list(bs_values), dtype=float)

    a2, m2 = np.meshgrid(alphas, mus, indexing="ij")
    if admissible:
        keep = m2 <= np.maximum(0.0, np.minimum(a2, 2.0 - a2)) + 1e-12
        a_pts, m_pts = a2[keep], m2[keep]
    else:
        a_pts, m_pts = a2.ravel(), m2.ravel()
    # Both margins share the mu^2 B_S term, so split off the B_S-free part.
    base8, base9 = povm_margins(a_pts, m_pts, 0.0)
    base = np.minimum(base8, base9)
    slope = 1.5 * m_pts**2

    best, arg = -np.inf, (math.nan, math.nan, math.nan)
    feasible: list[tuple[float, float, float]] = []
    n_feasible = 0
    for bs in bs_grid:
        margin = base + slope * bs
        k = int(np.argmax(margin))
        if margin[k] > best:
            best = float(margin[k])
            arg = (float(a_pts[k]), float(m_pts[k]), float(bs))
        if margin[k] <= 0.0:
            continue
        hits = np.flatnonzero(margin > 0.0)
        n_feasible += hits.size
        for h in hits[: max(0, max_points - len(feasible))]:
            feasible.append((float(a_pts[h]), float(m_pts[h]), float(bs)))

    grid = {
        "alpha": [float(alphas[0]), float(alphas[-1]), alpha_step],
        "mu": [0.0, mu_top, mu_step],
        "bs": [float(bs_grid[0]), float(bs_grid[-1]), bs_step if bs_values is None else None],
        "n_bs": int(bs_grid.size),
        "n_points": int(a_pts.size * bs_grid.size),
        "admissible": admissible,
        "n_feasible": n_feasible,
    }
    return ScanResult(grid, feasible, best, arg)


# --- quantum strategy searches --------------------------------------------------


def _payoff_weights(game: GameParams | UtilityTable) -> tuple[np.ndarray, np.ndarray]:
    table = utility_from_params(game) if isinstance(game, GameParams) else game
    w = table.prior[:, :, None, None]
    return w * table.u_A, w * table.u_B


class _Evaluator:
    """Fast payoff evaluation for a fixed state and game, angles in strategy order."""

    def __init__(self, strategy: QuantumStrategy, game):
        self.rho = strategy.state.rho
        self.povm = strategy.povm
        self.wa, self.wb = _payoff_weights(game)
        self.base = strategy.angles()

    def payoffs(self, angles8) -> PayoffPair:
        ea = effects_from_angles(angles8[:4], self.povm)
        fb = effects_from_angles(angles8[4:], self.povm)
        p = born_probabilities(self.rho, ea, fb)
        return PayoffPair(float(np.sum(self.wa * p)), float(np.sum(self.wb * p)))

    def full(self, angles, player: str | None) -> np.ndarray:
        if player is None:
            return np.asarray(angles, dtype=float)
        out = self.base.copy()
        if player == "A":
            out[:4] = angles
        else:
            out[4:] = angles
        return out


def strategy_payoffs(strategy: QuantumStrategy, game: GameParams | UtilityTable = PKLSZDK) -> PayoffPair:
    from nlgames.game import average_payoffs

    table = utility_from_params(game) if isinstance(game, GameParams) else game
    return average_payoffs(table, box_from_strategy(strategy))


def best_response(
    strategy: QuantumStrategy,
    game: GameParams | UtilityTable = PKLSZDK,
    player: str = "B",
    config: SearchConfig | None = None,
) -> OptimizationResult:
    """Maximize one player's payoff over their four angles, everything else fixed.

    The current angles are always tried as the first start, so the result
    never falls below the player's present payoff.
    """
    if player not in ("A", "B"):
        raise ValueError(f"player must be 'A' or 'B', got {player!r}")
    config = config or SearchConfig()
    ev = _Evaluator(strategy, game)
    idx = 0 if player == "A" else 1

    def objective(x):
        return tuple(ev.payoffs(ev.full(x, player)))[idx]

    own = ev.base[:4] if player == "A" else ev.base[4:]
    cands, n_eval = multistart_maximize(objective, 2, config, starts=[own])
    best = best_candidate(cands)
    full = ev.full(best.params, player)
    return OptimizationResult(
        best_params=best.params,
        best_value=objective(best.params),
        payoffs=ev.payoffs(full),
        evaluations=n_eval,
        converged=best.converged,
        candidates=cands,
    )


def constant_responses(
    strategy: QuantumStrategy, game: GameParams | UtilityTable = PKLSZDK, player: str = "B"
) -> list[tuple[tuple[float, float, float, float], float]]:
    """The deviator's payoff for each of the 4 choices of +z / -z per setting."""
    ev = _Evaluator(strategy, game)
    idx = 0 if player == "A" else 1
    out = []
    for t0 in (0.0, math.pi):
        for t1 in (0.0, math.pi):
            angles = (t0, 0.0, t1, 0.0)
            out.append((angles, tuple(ev.payoffs(ev.full(angles, player)))[idx]))
    return out


def quantum_equilibrium_gaps(
    strategy: QuantumStrategy,
    game: GameParams | UtilityTable = PKLSZDK,
    config: SearchConfig | None = None,
) -> dict[str, float]:
    """Best payoff improvement available to each player by changing their angles."""
    here = _Evaluator(strategy, game).payoffs(strategy.angles())
    return {
        "A": best_response(strategy, game, "A", config).best_value - here.alice,
        "B": best_response(strategy, game, "B", config).best_value - here.bob,
    }


def is_quantum_equilibrium(
    strategy: QuantumStrategy,
    game: GameParams | UtilityTable = PKLSZDK,
    tol: float = 1e-4,
    config: SearchConfig | None = None,
) -> bool:
    gaps = quantum_equilibrium_gaps(strategy, game, config)
    return max(gaps.values()) <= tol


@dataclass
class SocialOptimum(OptimizationResult):
    reference: PayoffPair | None = None
    beats_reference: bool = False


def social_optimum(
    state: TwoQubitState,
    game: GameParams | UtilityTable = PKLSZDK,
    config: SearchConfig | None = None,
    reference: PayoffPair | None = None,
    povm: POVMParams | None = None,
    sum_tol: float = 1e-6,
) -> SocialOptimum:
    """Maximize F_A + F_B over all eight angles.

    Among restarts whose sum is within ``sum_tol`` of the best, the one with the
    largest min(F_A - ref_A, F_B - ref_B) is reported.  The reference defaults to
    the pure equilibrium most favourable to Alice.
    """
    config = config or SearchConfig()
    if reference is None:
        report = find_pure_nash(game)
        reference = max((e.payoffs for e in report), key=lambda p: p.alice)
    dummy = QuantumStrategy(state, (MeasDirection(0, 0),) * 2, (MeasDirection(0, 0),) * 2, povm)
    ev = _Evaluator(dummy, game)
    cands, n_eval = multistart_maximize(lambda x: ev.payoffs(x).total, 4, config)
    top = best_candidate(cands).value

    def split(c):
        p = ev.payoffs(c.params)
        return min(p.alice - reference.alice, p.bob - reference.bob)

    near = [c for c in cands if c.value >= top - sum_tol]
    chosen = max(near, key=split)
    pay = ev.payoffs(chosen.params)
    return SocialOptimum(
        best_params=chosen.params,
        best_value=pay.total,
        payoffs=pay,
        evaluations=n_eval,
        converged=chosen.converged,
        candidates=cands,
        reference=reference,
        beats_reference=split(chosen) > 0,
    )


# --- closed forms for a|00> + b|11> ------------------------------------------


def _vectors(dirs) -> list[np.ndarray]:
    return [d.vector if isinstance(d, MeasDirection) else np.asarray(d, float) for d in dirs]


def projective_payoffs_closed_form(a: float, dirs) -> PayoffPair:
    """G(1/2, 1) payoffs for a|00> + b|11> with Alice along p, q and Bob along r, s."""
    p, q, r, s = _vectors(dirs)
    b = math.sqrt(1.0 - a * a)
    cross = (
        r[0] * (p[0] + q[0]) + s[0] * (p[0] - q[0]) - r[1] * (p[1] + q[1]) - s[1] * (p[1] - q[1])
    )
    zz = r[2] * (p[2] + q[2]) + s[2] * (p[2] - q[2])
    core = 3.0 + 1.5 * a * b * cross + 0.75 * zz
    tilt = 0.25 * fair_condition_projective(a, dirs)
    return PayoffPair((core + tilt) / 8.0, (core - tilt) / 8.0)


def fair_condition_projective(a: float, dirs) -> float:
    """(a^2 - b^2)(q3 + s3 + 2(p3 + r3)); zero exactly when F_A = F_B."""
    p, q, r, s = _vectors(dirs)
    return (2.0 * a * a - 1.0) * (q[2] + s[2] + 2.0 * (p[2] + r[2]))


def example_payoff_family(a: float) -> PayoffPair:
    """Payoffs of a|00> + b|11> under theta0 = -pi/15, theta1 = pi/3, phi = pi/2."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"amplitude a must lie in (0, 1), got {a}")
    t = math.pi / 15
    ab = a * math.sqrt(1.0 - a * a)
    shared = (
        0.75 * math.cos(t) ** 2
        + 1.5 * a * math.sqrt(3.0 * (1.0 - a * a)) * math.sin(t)
        - 1.5 * ab * math.sin(t) ** 2
        + 45.0 / 16.0
        + 9.0 * ab / 8.0
    )
    tilt = (2 * a * a - 1.0) / 4.0
    fa = ((2 * a * a - 0.25) * math.cos(t) + shared + tilt) / 8.0
    fb = ((1.75 - 2 * a * a) * math.cos(t) + shared - tilt) / 8.0
    return PayoffPair(fa, fb)


def gisin_payoffs(a: float) -> PayoffPair:
    """Closed-form G(1/2, 1) payoffs quoted for the Gisin settings, as a function of a."""
    a2, a4 = a * a, a**4
    root = 2.0 * math.sqrt(1.0 + 4.0 * a2 - 4.0 * a4)
    fa = ((7.0 + 22.0 * a2 - 24.0 * a4) / root + 2.0 * a2 + 5.0) / 16.0
    fb = ((5.0 + 26.0 * a2 - 24.0 * a4) / root - 2.0 * a2 + 7.0) / 16.0
    return PayoffPair(fa, fb)


def gisin_bound_substituted(a: float) -> PayoffPair:
    """G(1/2, 1) closed form with B set to the Gisin bound and K from the Gisin settings' box.

    This reconstruction reproduces gisin_payoffs; the Born-rule box of the same
    settings has standard CHSH 0 and reaches the bound only after relabeling.
    """
    k = k_statistic(box_from_strategy(gisin_settings(a)))
    bell = chsh_max_pure(a)
    return PayoffPair((3.0 + 1.5 * bell + k) / 16.0, (9.0 + 1.5 * bell - k) / 16.0)


def gisin_curve(a_grid: Sequence[float]) -> list[tuple[float, PayoffPair]]:
    out = []
    for a in a_grid:
        if not 0.0 < a < 1.0:
            raise ValueError(f"grid point {a} outside (0, 1)")
        out.append((float(a), gisin_payoffs(a)))
    return out


def default_a_grid(points: int = 999) -> np.ndarray:
    return np.arange(1, points + 1) / (points + 1)


def curve_csv(curve: list[tuple[float, PayoffPair]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "F_A", "F_B"])
    for a, p in curve:
        w.writerow([f"{a:.9g}", f"{p.alice:.9g}", f"{p.bob:.9g}"])
    return buf.getvalue()


# --- reference strategies and thresholds ------------------------------------------


def deviation_strategy(a: float = 0.9) -> QuantumStrategy:
    """Bob's reported deviation from the a = 0.9 example, Alice unchanged."""
    from nlgames.quantum import example_strategy

    base = example_strategy(a)
    bob = (MeasDirection(0.451517, -1.5708), MeasDirection(1.25911, 1.5708))
    return QuantumStrategy(base.state, base.alice, bob)


def reported_social_strategy(a: float = 0.9) -> QuantumStrategy:
    """Reported social-optimum angles for a = 0.9."""
    alice = (MeasDirection(0.0, -2.3636), MeasDirection(-1.5708, 0.777996))
    bob = (MeasDirection(-0.6653, -0.7780), MeasDirection(0.6653, -0.7780))
    return QuantumStrategy(pure_state(a), alice, bob)


def werner_fair_advantage(p: float) -> FairAdvantage:
    s = singlet_chsh_strategy(werner(p))
    return fair_advantage(box_from_strategy(s))


def werner_threshold(tol: float = 1e-6) -> float:
    """Bisection for the smallest Werner weight whose CHSH-optimal box beats 9/16."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if werner_fair_advantage(mid).advantageous:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
