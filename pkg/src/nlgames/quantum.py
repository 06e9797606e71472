"""Two-qubit advice states, qubit measurements and the boxes they produce."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from nlgames.boxes import Box

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SX, SY, SZ)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Density operator on C^2 (Alice) x C^2 (Bob), basis |00>, |01>, |10>, |11>."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex).reshape(4, 4)
        if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix has trace {tr}")
        low = np.linalg.eigvalsh(rho).min()
        if low < PSD_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {low:.3e}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, psi) -> "TwoQubitState":
        psi = np.asarray(psi, dtype=complex).reshape(4)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def reduced_alice(self) -> np.ndarray:
        return np.einsum("xzyz->xy", self.rho.reshape(2, 2, 2, 2))

    def reduced_bob(self) -> np.ndarray:
        return np.einsum("xzxw->zw", self.rho.reshape(2, 2, 2, 2))


def pure_state(a: float) -> TwoQubitState:
    """a|00> + b|11> with b = sqrt(1 - a^2)."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"amplitude a must lie in (0, 1), got {a}")
    b = math.sqrt(1.0 - a * a)
    return TwoQubitState.from_ket([a, 0.0, 0.0, b])


def singlet() -> TwoQubitState:
    return werner(1.0)


def werner(p: float) -> TwoQubitState:
    """p |psi-><psi-| + (1 - p) I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner weight p must lie in [0, 1], got {p}")
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
    return TwoQubitState(p * np.outer(psi, psi) + (1.0 - p) * np.eye(4) / 4.0)


@dataclass(frozen=True)
class MeasDirection:
    theta: float
    phi: float

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    @classmethod
    def from_vector(cls, v) -> "MeasDirection":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0]))


Z_UP = MeasDirection(0.0, 0.0)
Z_DOWN = MeasDirection(math.pi, 0.0)


@dataclass(frozen=True)
class POVMParams:
    alpha: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"POVM alpha must lie in (0, 2], got {self.alpha}")
        if not 0.0 <= self.mu <= min(self.alpha, 2.0 - self.alpha) + 1e-12:
            raise ValueError(
                f"POVM mu must lie in [0, min(alpha, 2 - alpha)], got mu={self.mu}"
            )


PROJECTIVE = POVMParams(1.0, 1.0)


def effects_povm(d: MeasDirection, pp: POVMParams) -> tuple[np.ndarray, np.ndarray]:
    """'+' effect (alpha I + mu d.sigma)/2 and its complement."""
    v = d.vector
    plus = 0.5 * (pp.alpha * I2 + pp.mu * (v[0] * SX + v[1] * SY + v[2] * SZ))
    return plus, I2 - plus


def effects_projective(d: MeasDirection) -> tuple[np.ndarray, np.ndarray]:
    return effects_povm(d, PROJECTIVE)


@dataclass(frozen=True)
class QuantumStrategy:
    state: TwoQubitState
    alice: tuple[MeasDirection, MeasDirection]
    bob: tuple[MeasDirection, MeasDirection]
    povm: POVMParams | None = None

    def __post_init__(self):
        if len(self.alice) != 2 or len(self.bob) != 2:
            raise ValueError("each player needs exactly two measurement directions")
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))

    def angles(self) -> np.ndarray:
        """(theta0_A, phi0_A, theta1_A, phi1_A, theta0_B, phi0_B, theta1_B, phi1_B)."""
        return np.array([v for d in self.alice + self.bob for v in (d.theta, d.phi)])

    def with_angles(self, angles, player: str | None = None) -> "QuantumStrategy":
        """Replace all 8 angles, or one player's 4 angles when ``player`` is given."""
        angles = list(angles)
        dirs = [MeasDirection(angles[k], angles[k + 1]) for k in range(0, len(angles), 2)]
        if player is None:
            return QuantumStrategy(self.state, tuple(dirs[:2]), tuple(dirs[2:]), self.povm)
        if player == "A":
            return QuantumStrategy(self.state, tuple(dirs), self.bob, self.povm)
        return QuantumStrategy(self.state, self.alice, tuple(dirs), self.povm)


def _effects(dirs, povm: POVMParams | None) -> np.ndarray:
    pp = povm or PROJECTIVE
    return np.array([effects_povm(d, pp) for d in dirs])  # (setting, outcome, 2, 2)


def born_probabilities(rho: np.ndarray, alice_effects: np.ndarray, bob_effects: np.ndarray) -> np.ndarray:
    """Raw Born-rule array p[i, j, a, b]; effects are shaped (setting, outcome, 2, 2)."""
    r = rho.reshape(2, 2, 2, 2)
    return np.einsum("xzyw,iayx,jbwz->ijab", r, alice_effects, bob_effects).real


def effects_from_angles(angles, povm: POVMParams | None = None) -> np.ndarray:
    """Effects for two directions given as (theta0, phi0, theta1, phi1)."""
    pp = povm or PROJECTIVE
    th = np.asarray(angles[0::2], dtype=float)
    ph = np.asarray(angles[1::2], dtype=float)
    v = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    plus = 0.5 * (pp.alpha * I2 + pp.mu * np.einsum("sk,kxy->sxy", v, np.array(PAULI)))
    return np.stack([plus, I2 - plus], axis=1)


def box_from_strategy(s: QuantumStrategy) -> Box:
    """Born rule: P(ab|ij) = Tr[rho (E^a_i x F^b_j)]."""
    return Box(born_probabilities(s.state.rho, _effects(s.alice, s.povm), _effects(s.bob, s.povm)))


def table3_closed_form(a: float, dirs) -> Box:
    """Closed-form distribution for a|00> + b|11> under projective measurements.

    ``dirs`` is (Alice setting 0, Alice setting 1, Bob setting 0, Bob setting 1),
    each a MeasDirection or a unit 3-vector.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"amplitude a must lie in (0, 1), got {a}")
    b = math.sqrt(1.0 - a * a)
    vecs = [d.vector if isinstance(d, MeasDirection) else np.asarray(d, float) for d in dirs]
    alice, bob = vecs[:2], vecs[2:]
    p = np.empty((2, 2, 2, 2))
    for i, j in itertools.product((0, 1), repeat=2):
        u, v = alice[i], bob[j]
        x = 2 * a * b * (v[0] * u[0] - v[1] * u[1])
        p[i, j, 0, 0] = x + b * b * (-1 + v[2]) * (u[2] - 1) + a * a * (v[2] + 1) * (u[2] + 1)
        p[i, j, 0, 1] = -x - b * b * (1 + v[2]) * (u[2] - 1) - a * a * (v[2] - 1) * (u[2] + 1)
        p[i, j, 1, 0] = -x - a * a * (1 + v[2]) * (u[2] - 1) - b * b * (v[2] - 1) * (u[2] + 1)
        p[i, j, 1, 1] = x + a * a * (-1 + v[2]) * (u[2] - 1) + b * b * (v[2] + 1) * (u[2] + 1)
    return Box(p / 4.0)


def chsh_max_pure(a: float) -> float:
    """Largest CHSH value of a|00> + b|11> under projective measurements."""
    b2 = 1.0 - a * a
    return 2.0 * math.sqrt(1.0 + 4.0 * a * a * b2)


def gisin_state(a: float) -> TwoQubitState:
    """a|01> + b|10>, the state the Gisin settings are written for."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"amplitude a must lie in (0, 1), got {a}")
    return TwoQubitState.from_ket([0.0, a, math.sqrt(1.0 - a * a), 0.0])


def gisin_settings(a: float) -> QuantumStrategy:
    """Alice along z and x, Bob at +/-beta in the x-z plane, cos(beta) = 1/sqrt(1 + 4a^2b^2).

    On a|01> + b|10> the resulting box reaches chsh_max_pure(a) in one of the
    relabeled CHSH variants (its standard CHSH value is 0).
    """
    cos_b = 2.0 / chsh_max_pure(a)
    beta = math.acos(cos_b)
    beta_p = math.acos(-cos_b)
    return QuantumStrategy(
        gisin_state(a),
        (MeasDirection(0.0, 0.0), MeasDirection(math.pi / 2, 0.0)),
        (MeasDirection(beta, 0.0), MeasDirection(beta_p, 0.0)),
    )


def singlet_chsh_strategy(state: TwoQubitState | None = None) -> QuantumStrategy:
    """Settings reaching CHSH = 2 sqrt(2) on the singlet (x-z plane, 45 degree steps)."""
    q = 3 * math.pi / 4
    return QuantumStrategy(
        state or singlet(),
        (MeasDirection(0.0, 0.0), MeasDirection(math.pi / 2, 0.0)),
        (MeasDirection(q, math.pi), MeasDirection(q, 0.0)),
    )


def example_strategy(a: float = 0.9) -> QuantumStrategy:
    """a|00> + b|11> with theta0 = -pi/15, phi0 = pi/2, theta1 = pi/3, phi1 = pi/2 for both."""
    d0 = MeasDirection(-math.pi / 15, math.pi / 2)
    d1 = MeasDirection(math.pi / 3, math.pi / 2)
    return QuantumStrategy(pure_state(a), (d0, d1), (d0, d1))
