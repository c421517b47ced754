"""JSON serialization for every public value type.

All writers are deterministic (sorted keys, fixed separators) and all
floats survive the round trip exactly: json emits shortest-repr decimals
and Python parses those back to the identical binary value.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .core import AtomicMeasure, CurveField, PolyCurve
from .lipfun import (
    Clamp,
    Const,
    DistTo,
    Linear,
    LipFunc,
    Max,
    Min,
    Neg,
    Scale,
    Sum,
    Wave,
)
from .regions import PolyRegion
from .domain import PolygonalDomain
from .aespace import AEElement, BASE, DipoleRep
from .smirnov import FlowGraph, GridField


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def save(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def load(path: str):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# core types


def field_to_json(f: CurveField) -> dict:
    return {
        "curves": [
            {"weight": c.weight, "vertices": [list(v) for v in c.vertices]}
            for c in f
        ]
    }


def field_from_json(d: dict) -> CurveField:
    return CurveField(
        [
            PolyCurve([tuple(v) for v in c["vertices"]], c["weight"])
            for c in d["curves"]
        ]
    )


def measure_to_json(m: AtomicMeasure) -> dict:
    return {
        "atoms": [
            {"location": list(p), "coefficient": c} for p, c in m.atoms
        ]
    }


def measure_from_json(d: dict) -> AtomicMeasure:
    return AtomicMeasure(
        [(tuple(a["location"]), a["coefficient"]) for a in d["atoms"]]
    )


def region_to_json(r: PolyRegion) -> dict:
    return {
        "outer": [list(v) for v in r.outer],
        "holes": [[list(v) for v in h] for h in r.holes],
    }


def region_from_json(d: dict) -> PolyRegion:
    return PolyRegion(
        [tuple(v) for v in d["outer"]],
        [[tuple(v) for v in h] for h in d.get("holes", [])],
    )


def domain_to_json(d: PolygonalDomain) -> dict:
    out = {"regions": [region_to_json(p) for p in d.parts]}
    if d.declared_eps is not None:
        out["eps"] = d.declared_eps
    if d.declared_delta is not None:
        out["delta"] = d.declared_delta
    return out


def domain_from_json(d: dict) -> PolygonalDomain:
    if "regions" in d:
        parts = [region_from_json(r) for r in d["regions"]]
    else:  # bare region file doubles as a single-part domain
        parts = [region_from_json(d)]
    return PolygonalDomain(tuple(parts), d.get("eps"), d.get("delta"))


# ---------------------------------------------------------------------------
# Lipschitz expression trees, tagged by node kind


def lipfunc_to_json(f: LipFunc) -> dict:
    if isinstance(f, Const):
        return {"kind": "const", "c": f.c}
    if isinstance(f, Linear):
        return {"kind": "linear", "v": list(f.v)}
    if isinstance(f, DistTo):
        return {"kind": "dist", "p": list(f.p)}
    if isinstance(f, Neg):
        return {"kind": "neg", "f": lipfunc_to_json(f.f)}
    if isinstance(f, Sum):
        return {"kind": "sum", "f": lipfunc_to_json(f.f), "g": lipfunc_to_json(f.g)}
    if isinstance(f, Scale):
        return {"kind": "scale", "s": f.s, "f": lipfunc_to_json(f.f)}
    if isinstance(f, Min):
        return {"kind": "min", "f": lipfunc_to_json(f.f), "g": lipfunc_to_json(f.g)}
    if isinstance(f, Max):
        return {"kind": "max", "f": lipfunc_to_json(f.f), "g": lipfunc_to_json(f.g)}
    if isinstance(f, Clamp):
        return {"kind": "clamp", "f": lipfunc_to_json(f.f), "lo": f.lo, "hi": f.hi}
    if isinstance(f, Wave):
        return {"kind": "wave", "a": f.a, "k": f.k, "d": list(f.d)}
    raise TypeError(f"unserializable LipFunc node: {type(f).__name__}")


def lipfunc_from_json(d: dict) -> LipFunc:
    k = d["kind"]
    if k == "const":
        return Const(d["c"])
    if k == "linear":
        return Linear(d["v"])
    if k == "dist":
        return DistTo(d["p"])
    if k == "neg":
        return Neg(lipfunc_from_json(d["f"]))
    if k == "sum":
        return Sum(lipfunc_from_json(d["f"]), lipfunc_from_json(d["g"]))
    if k == "scale":
        return Scale(d["s"], lipfunc_from_json(d["f"]))
    if k == "min":
        return Min(lipfunc_from_json(d["f"]), lipfunc_from_json(d["g"]))
    if k == "max":
        return Max(lipfunc_from_json(d["f"]), lipfunc_from_json(d["g"]))
    if k == "clamp":
        return Clamp(lipfunc_from_json(d["f"]), d["lo"], d["hi"])
    if k == "wave":
        return Wave(d["a"], d["k"], d["d"])
    raise ValueError(f"unknown LipFunc kind: {k!r}")


# ---------------------------------------------------------------------------
# Arens-Eells values


def element_to_json(m: AEElement) -> dict:
    return {"support": measure_to_json(m.support), "X": m.X}


def element_from_json(d: dict) -> AEElement:
    if "support" in d:
        return AEElement(measure_from_json(d["support"]), d.get("X", ""))
    return AEElement(measure_from_json(d))  # bare measure accepted


def _node_to_json(p):
    return "e" if p == BASE else list(p)


def _node_from_json(v):
    return BASE if v == "e" else tuple(v)


def dipole_to_json(rep: DipoleRep) -> dict:
    return {
        "terms": [
            {"coefficient": a, "p": _node_to_json(p), "q": _node_to_json(q)}
            for a, p, q in rep.terms
        ],
        "cost": rep.cost,
    }


def dipole_from_json(d: dict) -> DipoleRep:
    return DipoleRep(
        tuple(
            (t["coefficient"], _node_from_json(t["p"]), _node_from_json(t["q"]))
            for t in d["terms"]
        ),
        d["cost"],
    )


# ---------------------------------------------------------------------------
# Smirnov values


def decomposition_to_json(curves: Sequence[PolyCurve]) -> dict:
    return {
        "curves": [
            {
                "weight": c.weight,
                "vertices": [list(v) for v in c.vertices],
                "kind": "cycle" if c.is_closed else "path",
            }
            for c in curves
        ]
    }


def gridfield_to_json(gf: GridField) -> dict:
    nx, ny = gf.shape
    return {
        "origin": list(gf.origin),
        "h": gf.h,
        "eps": gf.eps,
        "nx": nx,
        "ny": ny,
        "fx": gf.fx.ravel().tolist(),
        "fy": gf.fy.ravel().tolist(),
        "tau": gf.tau.ravel().tolist(),
    }


def gridfield_from_json(d: dict) -> GridField:
    shape = (d["nx"], d["ny"])
    return GridField(
        tuple(d["origin"]),
        d["h"],
        d["eps"],
        np.array(d["fx"]).reshape(shape),
        np.array(d["fy"]).reshape(shape),
        np.array(d["tau"]).reshape(shape),
    )
