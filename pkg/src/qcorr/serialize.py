"""JSON formats for states, observables, maps and ensembles.

All matrices are encoded as separate row-major real/imaginary parts:
{"re": [[...]], "im": [[...]]}. States add factor dimensions {"d1", "d2"};
maps are {"d", "choi", "name"}; ensembles are {"weights", "members"} with
state-encoded members.
"""

from __future__ import annotations

import json

import numpy as np

from .bipartite import BipartiteSpace, BipartiteState
from .errors import ParseError
from .measures import Ensemble
from .posmaps import PositiveMapSpec, is_unital


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(path: str, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _field(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    return obj[key]


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    re = _field(obj, "re", where)
    im = _field(obj, "im", where)
    try:
        re_a = np.asarray(re, dtype=float)
        im_a = np.asarray(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: fields 're'/'im' must be numeric arrays") from exc
    if re_a.ndim != 2 or re_a.shape != im_a.shape:
        raise ParseError(f"{where}: 're' and 'im' must be equal-shape 2-D arrays")
    return re_a + 1j * im_a


def state_to_json(s: BipartiteState) -> dict:
    out = {"d1": s.space.d1, "d2": s.space.d2}
    out.update(matrix_to_json(s.rho))
    return out


def state_from_json(obj, where: str = "state") -> BipartiteState:
    d1 = _field(obj, "d1", where)
    d2 = _field(obj, "d2", where)
    if not isinstance(d1, int) or not isinstance(d2, int) or d1 < 1 or d2 < 1:
        raise ParseError(f"{where}: fields 'd1'/'d2' must be positive integers")
    rho = matrix_from_json(obj, where)
    return BipartiteState(BipartiteSpace(d1, d2), rho)


def map_to_json(alpha: PositiveMapSpec) -> dict:
    return {"d": alpha.d, "choi": matrix_to_json(alpha.choi), "name": alpha.name}


def map_from_json(obj, where: str = "map") -> PositiveMapSpec:
    d = _field(obj, "d", where)
    if not isinstance(d, int) or d < 1:
        raise ParseError(f"{where}: field 'd' must be a positive integer")
    choi = matrix_from_json(_field(obj, "choi", where), f"{where}.choi")
    name = obj.get("name", "")
    spec = PositiveMapSpec(d, choi, str(name))
    if is_unital(spec):
        spec = PositiveMapSpec(d, choi, str(name), unital_checked=True)
    return spec


def ensemble_to_json(e: Ensemble) -> dict:
    members = [state_to_json(BipartiteState(e.space, m)) for m in e.members]
    return {"weights": list(map(float, e.weights)), "members": members}


def ensemble_from_json(obj, where: str = "ensemble") -> Ensemble:
    weights = _field(obj, "weights", where)
    members_json = _field(obj, "members", where)
    if not isinstance(weights, list) or not isinstance(members_json, list):
        raise ParseError(f"{where}: 'weights' and 'members' must be lists")
    if not members_json:
        raise ParseError(f"{where}: 'members' must be non-empty")
    states = [state_from_json(m, f"{where}.members[{i}]") for i, m in enumerate(members_json)]
    space = states[0].space
    for i, s in enumerate(states):
        if s.space != space:
            raise ParseError(f"{where}.members[{i}]: inconsistent factor dimensions")
    w = np.asarray(weights, dtype=float)
    bary = sum(wi * s.rho for wi, s in zip(w, states))
    return Ensemble(space, w, tuple(s.rho for s in states), BipartiteState(space, bary))
