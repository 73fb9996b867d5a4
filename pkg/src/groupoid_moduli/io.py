"""JSON readers and writers for groupoids, surfaces, subgroupoids and fields."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebroid import AlgebroidData, MorphismField, PoissonData, grid_expressions
from .errors import AxiomError, InputError
from .fingroupoid import (
    FiniteGroupoid,
    Subgroupoid,
    action_groupoid,
    base_subgroupoid,
    checked,
    disjoint_union,
    full_subgroupoid,
    generated_subgroupoid,
    group_as_groupoid,
    pair_groupoid,
    subgroupoid,
)
from .groups import cyclic_table, symmetric_group
from .surface import CWSurface, bordered_cw, genus_g_cw, sphere_cw, torus_grid


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def dumps(obj: Any) -> str:
    """Canonical report encoding: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _need(obj: dict, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{what} is missing the {key!r} field")
    return obj[key]


# -- groupoids -----------------------------------------------------------------


def group_table(obj) -> list[list[int]]:
    """``{"table": [[...]]}``, ``{"cyclic": n}`` or ``{"symmetric": n}``."""
    if isinstance(obj, list):
        return obj
    if not isinstance(obj, dict):
        raise InputError("a group is given as {'table': ...}, {'cyclic': n} or {'symmetric': n}")
    if "table" in obj:
        return obj["table"]
    if "cyclic" in obj:
        return cyclic_table(int(obj["cyclic"]))
    if "symmetric" in obj:
        return symmetric_group(int(obj["symmetric"]))[1]
    raise InputError("a group is given as {'table': ...}, {'cyclic': n} or {'symmetric': n}")


def groupoid_from_json(obj: Any) -> FiniteGroupoid:
    if not isinstance(obj, dict):
        raise InputError("a groupoid must be a JSON object")
    if "pair" in obj:
        return pair_groupoid(int(obj["pair"]))
    if "group" in obj:
        return group_as_groupoid(group_table(obj["group"]))
    if "action" in obj:
        act = obj["action"]
        table = group_table(_need(act, "group", "action groupoid"))
        action = _need(act, "act", "action groupoid")
        points = act.get("points", len(action[0]) if action else 0)
        if any(len(row) != points for row in action):
            raise InputError(f"every action row must list {points} points")
        return action_groupoid(table, action)
    if "disjoint_union" in obj:
        return disjoint_union(*(groupoid_from_json(p) for p in obj["disjoint_union"]))
    n = _need(obj, "objects", "groupoid")
    arrows = sorted(_need(obj, "arrows", "groupoid"), key=lambda a: a["id"])
    if [a["id"] for a in arrows] != list(range(len(arrows))):
        raise InputError("arrow ids must be 0..n-1")
    g = FiniteGroupoid(
        n,
        [a["src"] for a in arrows],
        [a["tgt"] for a in arrows],
        _need(obj, "identity", "groupoid"),
        _need(obj, "inverse", "groupoid"),
        [tuple(t) for t in _need(obj, "compose", "groupoid")],
    )
    return g


def load_groupoid(path: str | Path, check: bool = True) -> FiniteGroupoid:
    g = groupoid_from_json(read_json(path))
    if check:
        try:
            checked(g)
        except AxiomError as exc:
            raise InputError(f"{path}: {exc}") from None
    return g


# -- subgroupoids --------------------------------------------------------------


def subgroupoid_from_json(g: FiniteGroupoid, obj: Any) -> Subgroupoid:
    """``{"full": true}``, ``{"base": true | [objects]}``,
    ``{"generated": [arrows], "objects": [...]}`` or ``{"arrows": [...], "objects": [...]}``."""
    if not isinstance(obj, dict):
        raise InputError("a subgroupoid must be a JSON object")
    if obj.get("full"):
        return full_subgroupoid(g)
    if "base" in obj:
        objs = None if obj["base"] is True else obj["base"]
        return base_subgroupoid(g, objs)
    if "generated" in obj:
        return generated_subgroupoid(g, obj["generated"], obj.get("objects", ()))
    return subgroupoid(g, _need(obj, "arrows", "subgroupoid"), obj.get("objects"))


def load_subgroupoid(g: FiniteGroupoid, path: str | Path) -> Subgroupoid:
    return subgroupoid_from_json(g, read_json(path))


# -- surfaces ------------------------------------------------------------------


def _word(w) -> tuple[tuple[int, int], ...]:
    return tuple((int(e), int(s)) for e, s in w)


def surface_from_json(obj: Any) -> CWSurface:
    """``{"closed": g}``, ``{"bordered": g, "boundary_vertices": k}``,
    ``{"torus_grid": n}``, ``{"sphere": true}`` or an explicit ``{"cw": {...}}``."""
    if not isinstance(obj, dict):
        raise InputError("a surface must be a JSON object")
    if "closed" in obj:
        return genus_g_cw(int(obj["closed"]))
    if "bordered" in obj:
        return bordered_cw(int(obj["bordered"]), int(obj.get("boundary_vertices", 1)))
    if "torus_grid" in obj:
        return torus_grid(int(obj["torus_grid"]))
    if obj.get("sphere"):
        return sphere_cw()
    cw = _need(obj, "cw", "surface")
    loops = cw.get("standard_loops")
    bl = cw.get("boundary_loop")
    return CWSurface(
        n_vertices=int(_need(cw, "vertices", "cw surface")),
        edges=tuple((int(u), int(v)) for u, v in _need(cw, "edges", "cw surface")),
        faces=tuple(_word(f) for f in _need(cw, "faces", "cw surface")),
        base=int(cw.get("base", 0)),
        boundary=tuple(int(e) for e in cw.get("boundary", ())),
        standard_loops=None if loops is None else tuple(_word(w) for w in loops),
        boundary_loop=None if bl is None else _word(bl),
        name=str(cw.get("name", "cw")),
    )


def load_surface(path: str | Path) -> CWSurface:
    return surface_from_json(read_json(path))


# -- algebroids and fields -----------------------------------------------------


def algebroid_from_json(obj: Any) -> AlgebroidData:
    d = int(_need(obj, "dim_M", "algebroid"))
    r = int(_need(obj, "rank_E", "algebroid"))
    rho = obj.get("rho", [[0] * r for _ in range(d)])
    return AlgebroidData.from_expressions(d, r, rho, _need(obj, "f", "algebroid"))


def poisson_from_json(obj: Any) -> PoissonData:
    return PoissonData.from_expressions(int(_need(obj, "dim_M", "Poisson structure")), _need(obj, "alpha", "Poisson structure"))


def load_algebroid(path: str | Path) -> AlgebroidData:
    return algebroid_from_json(read_json(path))


def load_poisson(path: str | Path) -> PoissonData:
    return poisson_from_json(read_json(path))


def grid_shape(grid: dict, h: float | None = None) -> tuple[tuple[int, int], tuple[float, float], tuple[float, float]]:
    """Resolve ``{"shape"|"extent", "h", "origin"}``; ``h`` overrides the file's spacing."""
    origin = tuple(float(o) for o in grid.get("origin", (0.0, 0.0)))
    step = grid.get("h") if h is None else h
    if step is None:
        raise InputError("grid needs a spacing 'h'")
    hh = (float(step), float(step)) if np.isscalar(step) else (float(step[0]), float(step[1]))
    if min(hh) <= 0:
        raise InputError("grid spacing must be positive")
    if "extent" in grid and (h is not None or "shape" not in grid):
        ext = grid["extent"]
        ext = (float(ext), float(ext)) if np.isscalar(ext) else (float(ext[0]), float(ext[1]))
        shape = (int(round(ext[0] / hh[0])) + 1, int(round(ext[1] / hh[1])) + 1)
    else:
        shape = tuple(int(n) for n in _need(grid, "shape", "grid"))
    return shape, hh, origin


def field_from_json(obj: Any, h: float | None = None) -> MorphismField:
    """``{"grid": {...}, "X": [expr], "j": [[expr, expr]]}`` in ``u0, u1``."""
    shape, hh, origin = grid_shape(_need(obj, "grid", "field"), h)
    return MorphismField.from_expressions(shape, hh, obj.get("X", []), _need(obj, "j", "field"), origin)


def beta_from_json(obj: Any, h: float | None = None) -> np.ndarray:
    shape, hh, origin = grid_shape(_need(obj, "grid", "field"), h)
    return grid_expressions(shape, hh, _need(obj, "beta", "field"), origin)
