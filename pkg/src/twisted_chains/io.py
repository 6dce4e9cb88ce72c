"""JSON readers and writers.  Rationals travel as strings such as ``"-3/7"`` or ``"4"``."""
from __future__ import annotations

import json
import os
from typing import Any, Dict, Optional, Union

from .chains import ChainComplex, GradedMap
from .exactq import QMatrix, format_rational, parse_rational
from .fibration import MonodromyRep
from .perturbation import SDRData
from .simplicial import MODELS, ReducedSimplicialSet, model
from .torsion import BasedComplex
from .twisting import TwistingCochain


class FormatError(ValueError):
    """Malformed input file."""


def _require(data: dict, key: str, what: str):
    if not isinstance(data, dict) or key not in data:
        raise FormatError(f"{what}: missing key {key!r}")
    return data[key]


def matrix_from_json(rows, shape: Optional[tuple] = None) -> QMatrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise FormatError("matrix must be a list of rows")
    try:
        entries = [[parse_rational(x) for x in r] for r in rows]
    except ValueError as e:
        raise FormatError(str(e)) from None
    if shape is None:
        if len({len(row) for row in entries}) > 1:
            raise FormatError("matrix rows have different lengths")
        return QMatrix.from_rows(entries)
    r, c = shape
    if r == 0 or c == 0:
        if any(entries) and len(entries) != r:
            raise FormatError(f"expected an empty {r}x{c} matrix")
        return QMatrix.zeros(r, c)
    if len(entries) != r or any(len(row) != c for row in entries):
        raise FormatError(f"expected a {r}x{c} matrix")
    return QMatrix(r, c, entries)


def matrix_to_json(m: QMatrix) -> list:
    return [[format_rational(x) for x in row] for row in m.tolist()]


def _degree_keyed(blocks: Dict[str, Any], what: str) -> Dict[int, Any]:
    out = {}
    for k, v in blocks.items():
        try:
            out[int(k)] = v
        except ValueError:
            raise FormatError(f"{what}: degree key {k!r} is not an integer") from None
    return out


# ---------------------------------------------------------------------------
# chain complexes and maps


def complex_from_json(data: dict) -> ChainComplex:
    lo = _require(data, "min_degree", "chain complex")
    dims = _require(data, "dims", "chain complex")
    if not isinstance(lo, int) or not all(isinstance(d, int) and d >= 0 for d in dims):
        raise FormatError("chain complex: min_degree must be int and dims non-negative ints")
    dimd = {lo + k: d for k, d in enumerate(dims)}
    diffs = {}
    for n, rows in _degree_keyed(data.get("differentials", {}), "chain complex").items():
        diffs[n] = matrix_from_json(rows, (dimd.get(n - 1, 0), dimd.get(n, 0)))
    return ChainComplex(lo, dims, diffs)


def complex_to_json(c: ChainComplex) -> dict:
    return {
        "min_degree": c.min_degree,
        "dims": list(c.dims),
        "differentials": {str(n): matrix_to_json(m) for n, m in sorted(c.differentials.items())
                          if not m.is_zero()},
    }


def graded_map_from_json(blocks: dict, source: ChainComplex, target: ChainComplex,
                         degree: int) -> GradedMap:
    out = {}
    for n, rows in _degree_keyed(blocks, "graded map").items():
        out[n] = matrix_from_json(rows, (target.dim(n + degree), source.dim(n)))
    return GradedMap(source, target, degree, out)


def graded_map_to_json(f: GradedMap) -> dict:
    return {str(n): matrix_to_json(m) for n, m in sorted(f.blocks.items()) if not m.is_zero()}


def perturbation_from_json(data: dict, big: ChainComplex) -> GradedMap:
    return graded_map_from_json(_require(data, "t", "perturbation"), big, big, -1)


def sdr_from_json(data: dict) -> SDRData:
    big = complex_from_json(_require(data, "big", "SDR"))
    small = complex_from_json(_require(data, "small", "SDR"))
    if "d" in data:
        small = ChainComplex(small.min_degree, small.dims,
                             {n: matrix_from_json(rows, (small.dim(n - 1), small.dim(n)))
                              for n, rows in _degree_keyed(data["d"], "SDR").items()})
    return SDRData(big, small,
                   graded_map_from_json(_require(data, "j", "SDR"), small, big, 0),
                   graded_map_from_json(_require(data, "r", "SDR"), big, small, 0),
                   graded_map_from_json(_require(data, "h", "SDR"), big, big, 1))


def sdr_to_json(s: SDRData) -> dict:
    return {
        "big": complex_to_json(s.big),
        "small": complex_to_json(s.small),
        "j": graded_map_to_json(s.j),
        "r": graded_map_to_json(s.r),
        "h": graded_map_to_json(s.h),
        "d": {str(n): matrix_to_json(m) for n, m in sorted(s.small.differentials.items())},
    }


def based_from_json(data: dict) -> BasedComplex:
    c = complex_from_json(data)
    basis = {n: matrix_from_json(rows, (c.dim(n), c.dim(n)))
             for n, rows in _degree_keyed(data.get("basis", {}), "based complex").items()}
    return BasedComplex(c, basis)


# ---------------------------------------------------------------------------
# simplicial sets and data over them


def simplicial_from_json(data: dict, name: str = "") -> ReducedSimplicialSet:
    raw = _require(data, "simplices", "simplicial set")
    simplices = {}
    for n, entries in _degree_keyed(raw, "simplicial set").items():
        simplices[n] = []
        for e in entries:
            faces = [(tuple(_require(f, "degen", "face")), _require(f, "target", "face"))
                     for f in _require(e, "faces", "simplex")]
            simplices[n].append((_require(e, "id", "simplex"), faces))
    return ReducedSimplicialSet(simplices, name=data.get("name", name))


def simplicial_to_json(x: ReducedSimplicialSet) -> dict:
    return {
        "name": x.name,
        "simplices": {str(n): [{"id": sid,
                                "faces": [{"degen": list(w), "target": t} for w, t in x.faces[sid]]}
                               for sid in x.ids[n]]
                      for n in sorted(x.ids)},
    }


BaseRef = Union[str, dict]


def resolve_base(ref: BaseRef, relative_to: Optional[str] = None) -> ReducedSimplicialSet:
    """A base is an inline simplicial set, a built-in model name, or a path to a JSON file."""
    if isinstance(ref, dict):
        return simplicial_from_json(ref)
    if not isinstance(ref, str):
        raise FormatError("base reference must be a model name, a path or an object")
    if ref in MODELS:
        return model(ref)
    path = ref
    if relative_to and not os.path.isabs(path):
        path = os.path.join(os.path.dirname(relative_to), path)
    return simplicial_from_json(load_json(path), name=os.path.splitext(os.path.basename(path))[0])


def _fiber_dims(data, what) -> list:
    dims = _require(data, "fiber_dims", what)
    if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 0 for d in dims):
        raise FormatError(f"{what}: fiber_dims must be a list of non-negative ints")
    return dims


def twisting_from_json(data: dict, base: Optional[ReducedSimplicialSet] = None,
                       relative_to: Optional[str] = None) -> TwistingCochain:
    if base is None:
        base = resolve_base(_require(data, "base", "twisting cochain"), relative_to)
    dims = _fiber_dims(data, "twisting cochain")
    t = sum(dims)
    comps = {sid: matrix_from_json(rows, (t, t)) for sid, rows in data.get("components", {}).items()}
    return TwistingCochain(base, dims, comps)


def twisting_to_json(phi: TwistingCochain, base_ref: BaseRef) -> dict:
    return {
        "base": base_ref,
        "fiber_dims": list(phi.fiber_dims),
        "components": {sid: matrix_to_json(m) for sid, m in sorted(phi.components.items())},
    }


def rep_from_json(data: dict, base: Optional[ReducedSimplicialSet] = None,
                  relative_to: Optional[str] = None) -> MonodromyRep:
    if base is None:
        base = resolve_base(_require(data, "base", "representation"), relative_to)
    dims = _fiber_dims(data, "representation")
    t = sum(dims)
    action = {e: matrix_from_json(rows, (t, t)) for e, rows in data.get("action", {}).items()}
    return MonodromyRep.from_generators(base, dims, action)


# ---------------------------------------------------------------------------
# files


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dumps(obj: Any) -> str:
    """Canonical serialization used for every report, so equal reports are equal bytes."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
