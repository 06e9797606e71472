"""Two-party, two-setting, two-outcome no-signaling boxes.

A box is stored as ``p[x_A, x_B, y_A, y_B] = P(y_A, y_B | x_A, x_B)``.  Outcome
index 0 is the '+' outcome and is played as action 0; index 1 is '-' / action 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import linprog

if TYPE_CHECKING:
    from nlgames.game import GameParams, PayoffPair

POSITIVITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
NO_SIGNALING_TOL = 1e-9

# Position of the minus sign in each CHSH variant: (setting A, setting B).
_MINUS_POSITIONS = ((1, 1), (1, 0), (0, 1), (0, 0))


class BoxValidationError(ValueError):
    """Raised when a box violates positivity, normalization or no-signaling."""

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        super().__init__(f"{constraint}: {detail}" if detail else constraint)


@dataclass(frozen=True, eq=False)
class Box:
    """Conditional distribution P(y_A, y_B | x_A, x_B) as a (2, 2, 2, 2) array."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.size != 16:
            raise BoxValidationError("shape", f"expected 16 entries, got {p.size}")
        p = p.reshape(2, 2, 2, 2)
        worst = p.min()
        if worst < -POSITIVITY_TOL:
            idx = np.unravel_index(np.argmin(p), p.shape)
            raise BoxValidationError("positivity", f"P[{idx}] = {worst:.3e}")
        p = np.clip(p, 0.0, None)
        sums = p.sum(axis=(2, 3))
        bad = np.abs(sums - 1.0)
        if bad.max() > NORMALIZATION_TOL:
            idx = np.unravel_index(np.argmax(bad), bad.shape)
            raise BoxValidationError(
                "normalization", f"setting {idx} sums to {sums[idx]:.12g}"
            )
        p = _project_no_signaling(p)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def flat(self) -> list[float]:
        return [float(v) for v in self.p.reshape(-1)]

    def alice_marginals(self) -> np.ndarray:
        """P(y_A = 0 | x_A) for x_A = 0, 1."""
        return self.p[:, 0, 0, :].sum(axis=-1)

    def bob_marginals(self) -> np.ndarray:
        """P(y_B = 0 | x_B) for x_B = 0, 1."""
        return self.p[0, :, :, 0].sum(axis=-1)

    def mix(self, other: "Box", weight: float) -> "Box":
        """Return ``weight * self + (1 - weight) * other``."""
        return Box(weight * self.p + (1.0 - weight) * other.p)


def _project_no_signaling(p: np.ndarray) -> np.ndarray:
    # m[i, j] = P(y_A=0 | i, j); n[i, j] = P(y_B=0 | i, j)
    m = p[:, :, 0, :].sum(axis=-1)
    n = p[:, :, :, 0].sum(axis=-1)
    dm = np.abs(m[:, 0] - m[:, 1])
    dn = np.abs(n[0, :] - n[1, :])
    if dm.max() > NO_SIGNALING_TOL:
        i = int(np.argmax(dm))
        raise BoxValidationError(
            "no-signaling", f"Alice's marginal for x_A={i} depends on x_B (diff {dm[i]:.3e})"
        )
    if dn.max() > NO_SIGNALING_TOL:
        j = int(np.argmax(dn))
        raise BoxValidationError(
            "no-signaling", f"Bob's marginal for x_B={j} depends on x_A (diff {dn[j]:.3e})"
        )
    if dm.max() == 0.0 and dn.max() == 0.0:
        return p
    m_avg = m.mean(axis=1)
    n_avg = n.mean(axis=0)
    out = np.empty_like(p)
    for i, j in itertools.product((0, 1), repeat=2):
        c = p[i, j, 0, 0]
        out[i, j] = _setting_block(m_avg[i], n_avg[j], c)
    return np.clip(out, 0.0, None)


def _setting_block(m: float, n: float, c: float) -> np.ndarray:
    return np.array([[c, m - c], [n - c, 1.0 - m - n + c]])


@dataclass(frozen=True)
class CanonicalBox:
    """Marginal / joint parametrization of a no-signaling box.

    ``m[i]`` is Alice's '+' probability for setting i, ``n[j]`` Bob's, and
    ``c[i][j]`` the joint '++' probability for settings (i, j).
    """

    m0: float
    m1: float
    n0: float
    n1: float
    c00: float
    c01: float
    c10: float
    c11: float

    def __post_init__(self):
        tol = NO_SIGNALING_TOL
        for name in ("m0", "m1", "n0", "n1", "c00", "c01", "c10", "c11"):
            v = getattr(self, name)
            if not (-tol <= v <= 1.0 + tol):
                raise BoxValidationError("range", f"{name}={v} outside [0, 1]")
        for i, j in itertools.product((0, 1), repeat=2):
            mi, nj, cij = self.m[i], self.n[j], self.c[i][j]
            lo, hi = max(0.0, mi + nj - 1.0), min(mi, nj)
            if cij < lo - tol or cij > hi + tol:
                raise BoxValidationError(
                    "positivity",
                    f"c{i}{j}={cij:.12g} outside [{lo:.12g}, {hi:.12g}]",
                )

    @property
    def m(self) -> tuple[float, float]:
        return (self.m0, self.m1)

    @property
    def n(self) -> tuple[float, float]:
        return (self.n0, self.n1)

    @property
    def c(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.c00, self.c01), (self.c10, self.c11))


def canonical_from_box(b: Box) -> CanonicalBox:
    m = b.alice_marginals()
    n = b.bob_marginals()
    c = b.p[:, :, 0, 0]
    return CanonicalBox(
        float(m[0]), float(m[1]), float(n[0]), float(n[1]),
        float(c[0, 0]), float(c[0, 1]), float(c[1, 0]), float(c[1, 1]),
    )


def box_from_canonical(c: CanonicalBox) -> Box:
    p = np.empty((2, 2, 2, 2))
    for i, j in itertools.product((0, 1), repeat=2):
        p[i, j] = _setting_block(c.m[i], c.n[j], c.c[i][j])
    # Positivity was checked on CanonicalBox with tolerance; clamp rounding.
    return Box(np.clip(p, 0.0, None))


def correlators(b: Box | CanonicalBox) -> np.ndarray:
    """<ij> = P(++) - P(+-) - P(-+) + P(--) as a 2x2 array."""
    if isinstance(b, CanonicalBox):
        b = box_from_canonical(b)
    p = b.p
    return p[:, :, 0, 0] - p[:, :, 0, 1] - p[:, :, 1, 0] + p[:, :, 1, 1]


def chsh(c: CanonicalBox | Box) -> float:
    """Bell-CHSH value <00> + <01> + <10> - <11> from the canonical parameters."""
    if isinstance(c, Box):
        c = canonical_from_box(c)
    return 2.0 + 4.0 * (c.c00 + c.c01 + c.c10 - c.c11) - 4.0 * (c.m0 + c.n0)


def chsh_from_correlators(b: Box | CanonicalBox) -> float:
    e = correlators(b)
    return float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])


def chsh_all_symmetries(b: Box | CanonicalBox) -> np.ndarray:
    """All 8 CHSH variants: minus sign at each of 4 positions, times +/-1.

    Index ``2*k`` places the minus sign at ``_MINUS_POSITIONS[k]`` and index
    ``2*k + 1`` is its negation; index 0 is the standard expression.
    """
    e = correlators(b)
    total = e.sum()
    out = np.empty(8)
    for k, (i, j) in enumerate(_MINUS_POSITIONS):
        v = total - 2.0 * e[i, j]
        out[2 * k] = v
        out[2 * k + 1] = -v
    return out


def max_chsh(b: Box | CanonicalBox) -> float:
    return float(np.max(chsh_all_symmetries(b)))


def k_statistic(c: CanonicalBox | Box) -> float:
    """2(m0 + n0) + m1 + n1."""
    if isinstance(c, Box):
        c = canonical_from_box(c)
    return 2.0 * (c.m0 + c.n0) + c.m1 + c.n1


def deterministic_box(alice: tuple[int, int], bob: tuple[int, int]) -> Box:
    """Box answering ``alice[x_A]`` and ``bob[x_B]`` with certainty."""
    p = np.zeros((2, 2, 2, 2))
    for xa, xb in itertools.product((0, 1), repeat=2):
        p[xa, xb, alice[xa], bob[xb]] = 1.0
    return Box(p)


def deterministic_boxes() -> list[Box]:
    """The 16 local deterministic vertices, ordered by (alice map, bob map)."""
    maps = list(itertools.product((0, 1), repeat=2))
    return [deterministic_box(a, b) for a in maps for b in maps]


def pr_box(r: int = 0, s: int = 0, t: int = 0) -> Box:
    """PR box with y_A xor y_B = x_A x_B xor r x_A xor s x_B xor t.

    ``pr_box()`` is the canonical one achieving CHSH = 4.
    """
    p = np.zeros((2, 2, 2, 2))
    for xa, xb, ya, yb in itertools.product((0, 1), repeat=4):
        if ya ^ yb == (xa & xb) ^ (r & xa) ^ (s & xb) ^ t:
            p[xa, xb, ya, yb] = 0.5
    return Box(p)


def pr_boxes() -> list[Box]:
    return [pr_box(r, s, t) for r, s, t in itertools.product((0, 1), repeat=3)]


def ns_vertices() -> list[Box]:
    """The 24 vertices of the 2-2-2 no-signaling polytope (16 local + 8 PR)."""
    return deterministic_boxes() + pr_boxes()


def uniform_box() -> Box:
    return Box(np.full((2, 2, 2, 2), 0.25))


def pr_d_mixture(q: float) -> Box:
    """q * PR + (1 - q) * D, with D the deterministic (g1_A, g3_B) box."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    d = deterministic_box((0, 0), (0, 1))
    return pr_box().mix(d, q)


def is_local(b: Box, tol: float = 1e-9) -> tuple[bool, np.ndarray | None]:
    """Decide whether ``b`` is a convex mixture of the 16 deterministic boxes.

    Returns ``(True, weights)`` with weights ordered as ``deterministic_boxes()``,
    or ``(False, None)`` when the feasibility LP has no solution.
    """
    verts = np.array([d.p.reshape(-1) for d in deterministic_boxes()]).T  # 16 x 16
    a_eq = np.vstack([verts, np.ones((1, 16))])
    b_eq = np.concatenate([b.p.reshape(-1), [1.0]])
    res = linprog(
        np.zeros(16), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * 16, method="highs"
    )
    if res.status != 0:
        return False, None
    w = np.clip(res.x, 0.0, None)
    if np.abs(a_eq @ w - b_eq).max() > tol:
        return False, None
    return True, w


def payoffs_closed_form(params: "GameParams", c: CanonicalBox | Box) -> "PayoffPair":
    """Payoffs of G(kappa, tau) under uniform prior, from B, marginals and c11."""
    from nlgames.game import PayoffPair

    if isinstance(c, Box):
        c = canonical_from_box(c)
    k, t = params.kappa, params.tau
    bell = chsh(c)
    s0 = c.m0 + c.n0
    s1 = c.m1 + c.n1
    fa = (3.0 + 1.5 * bell + 2.0 * s0 + s1) / 16.0
    fb = (
        (10.0 * t - 2.0 * k)
        + (t + k) * bell
        + 4.0 * (k - t) * s0
        + (3.0 - 4.0 * t) * s1
        + 4.0 * (k + t - 1.5) * c.c11
    ) / 16.0
    return PayoffPair(fa, fb)


def random_ns_box(rng: np.random.Generator) -> Box:
    """Random point of the NS polytope as a Dirichlet mixture of its 24 vertices."""
    w = rng.dirichlet(np.full(24, 0.3))
    p = np.tensordot(w, np.array([v.p for v in ns_vertices()]), axes=1)
    return Box(p)


def random_canonical(rng: np.random.Generator) -> CanonicalBox:
    """Random valid canonical box: uniform marginals, c_ij uniform in its range."""
    m = rng.uniform(size=2)
    n = rng.uniform(size=2)
    cs = []
    for i, j in itertools.product((0, 1), repeat=2):
        lo, hi = max(0.0, m[i] + n[j] - 1.0), min(m[i], n[j])
        cs.append(rng.uniform(lo, hi))
    return CanonicalBox(m[0], m[1], n[0], n[1], *cs)
