"""JSON file formats for games, boxes, states and strategies.

Index order for 16-entry arrays is (x_A, x_B, y_A, y_B), row-major.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from nlgames.boxes import Box, CanonicalBox, box_from_canonical, canonical_from_box
from nlgames.game import GameParams, UtilityTable, utility_from_params
from nlgames.quantum import (
    MeasDirection,
    POVMParams,
    QuantumStrategy,
    TwoQubitState,
    pure_state,
    werner,
)


class FormatError(ValueError):
    """The file is not valid JSON or lacks required fields."""


class ConstraintError(ValueError):
    """The file parses but its contents violate a physical or game constraint."""


def read_json(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    return data


def _reals(data: dict, key: str, n: int) -> list[float]:
    if key not in data:
        raise FormatError(f"missing field {key!r}")
    v = data[key]
    if not isinstance(v, list) or len(v) != n:
        raise FormatError(f"field {key!r} must be a list of {n} numbers")
    try:
        return [float(x) for x in v]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r}: {exc}") from exc


def _real(data: dict, key: str) -> float:
    try:
        return float(data[key])
    except KeyError as exc:
        raise FormatError(f"missing field {key!r}") from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r}: {exc}") from exc


def _checked(fn, *args):
    try:
        return fn(*args)
    except FormatError:
        raise
    except ValueError as exc:
        raise ConstraintError(str(exc)) from exc


# --- games ---


def game_from_json(data: dict) -> GameParams | UtilityTable:
    if "kappa" in data or "tau" in data:
        return _checked(GameParams, _real(data, "kappa"), _real(data, "tau"))
    if "uA" in data:
        u_a = _reals(data, "uA", 16)
        u_b = _reals(data, "uB", 16)
        prior = _reals(data, "prior", 4) if "prior" in data else [0.25] * 4
        return _checked(UtilityTable, np.array(u_a), np.array(u_b), np.array(prior))
    raise FormatError("game file needs 'kappa'/'tau' or 'uA'/'uB'")


def game_to_json(game: GameParams | UtilityTable) -> dict:
    if isinstance(game, GameParams):
        return {"kappa": game.kappa, "tau": game.tau}
    return {
        "uA": game.u_A.reshape(-1).tolist(),
        "uB": game.u_B.reshape(-1).tolist(),
        "prior": game.prior.reshape(-1).tolist(),
    }


def as_table(game: GameParams | UtilityTable) -> UtilityTable:
    return utility_from_params(game) if isinstance(game, GameParams) else game


# --- boxes ---


def box_from_json(data: dict) -> Box:
    fmt = data.get("format")
    if fmt == "full":
        return _checked(Box, np.array(_reals(data, "p", 16)))
    if fmt == "canonical":
        m = _reals(data, "m", 2)
        n = _reals(data, "n", 2)
        c = _reals(data, "c", 4)
        canon = _checked(CanonicalBox, m[0], m[1], n[0], n[1], *c)
        return _checked(box_from_canonical, canon)
    raise FormatError(f"box 'format' must be 'full' or 'canonical', got {fmt!r}")


def box_to_json(b: Box, canonical: bool = False) -> dict:
    if not canonical:
        return {"format": "full", "p": b.flat()}
    c = canonical_from_box(b)
    return {
        "format": "canonical",
        "m": [c.m0, c.m1],
        "n": [c.n0, c.n1],
        "c": [c.c00, c.c01, c.c10, c.c11],
    }


# --- states and strategies ---


def state_from_json(data: dict) -> TwoQubitState:
    if "pure_a" in data:
        return _checked(pure_state, _real(data, "pure_a"))
    if "werner_p" in data:
        return _checked(werner, _real(data, "werner_p"))
    if "rho" in data:
        entries = data["rho"]
        if not isinstance(entries, list) or len(entries) != 16:
            raise FormatError("field 'rho' must list 16 [re, im] pairs")
        try:
            vals = [complex(float(re), float(im)) for re, im in entries]
        except (TypeError, ValueError) as exc:
            raise FormatError(f"field 'rho': {exc}") from exc
        return _checked(TwoQubitState, np.array(vals).reshape(4, 4))
    raise FormatError("state needs one of 'pure_a', 'werner_p', 'rho'")


def state_to_json(state: TwoQubitState) -> dict:
    return {"rho": [[float(z.real), float(z.imag)] for z in state.rho.reshape(-1)]}


def _directions(data: dict, key: str) -> tuple[MeasDirection, MeasDirection]:
    v = data.get(key)
    if not isinstance(v, list) or len(v) != 2:
        raise FormatError(f"field {key!r} must be [[theta, phi], [theta, phi]]")
    try:
        return tuple(MeasDirection(float(t), float(p)) for t, p in v)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r}: {exc}") from exc


def strategy_from_json(data: dict) -> QuantumStrategy:
    state = state_from_json(data)
    alice = _directions(data, "alice")
    bob = _directions(data, "bob")
    povm = None
    if "povm" in data:
        pv = data["povm"]
        if not isinstance(pv, dict):
            raise FormatError("field 'povm' must be an object")
        povm = _checked(POVMParams, _real(pv, "alpha"), _real(pv, "mu"))
    return QuantumStrategy(state, alice, bob, povm)


def strategy_to_json(s: QuantumStrategy) -> dict:
    out = state_to_json(s.state)
    out["alice"] = [[d.theta, d.phi] for d in s.alice]
    out["bob"] = [[d.theta, d.phi] for d in s.bob]
    if s.povm is not None:
        out["povm"] = {"alpha": s.povm.alpha, "mu": s.povm.mu}
    return out
