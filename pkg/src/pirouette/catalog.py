"""Named generating functions and definition-file round trips.

The catalog carries the worked examples every experiment leans on:
shears, rotations, saddles, and the degenerate quartic maxima whose
orbits concentrate on the fixed point. Entries are built from exact
polynomial terms and must pass the standard audits.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigInvalid
from .genfun import (GeneratedMap, GeneratingFunction, MapFactorization,
                     Window)
from .rotation import rigid_rotation_terms

_SQUARE = (-1.0, 1.0, -1.0, 1.0)
# 2 * 0.705^2 = 0.99405 keeps the quartic twist under its 0.995 bound
_QUARTIC_SQUARE = (-0.705, 0.705, -0.705, 0.705)

_NAME_RE = re.compile(r"^([a-z][a-z-]*)(?:\(([^()]*)\))?$")


@dataclass(frozen=True)
class CatalogEntry:
    """A named map: one or more generating-function factors plus the
    window they act on."""
    name: str
    factors: tuple
    window: Window

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def factorization(self) -> MapFactorization:
        return MapFactorization(self.factors)

    @property
    def map(self):
        """Single-factor entries give the bare map; multi-factor ones
        give the factorization (same evaluation surface)."""
        if self.k == 1:
            return GeneratedMap(self.factors[0])
        return self.factorization


def _entry(name, terms, window, twist_bound=None) -> CatalogEntry:
    w = Window(*window)
    g = GeneratingFunction.from_terms(terms, w, twist_bound=twist_bound)
    return CatalogEntry(name, (g,), w)


def _build_shear(arg):
    _reject_arg("shear", arg)
    return _entry("shear", [(0, 2, 0.5)], _SQUARE, 0.0)


def _build_elliptic(arg):
    a = _float_arg("elliptic", arg, default=0.1)
    if not 0.0 < abs(a) < 2.0:
        raise ConfigInvalid("elliptic strength must be in (0, 2)")
    return _entry(f"elliptic({a!r})",
                  [(2, 0, a / 2), (0, 2, a / 2)], _SQUARE, 0.0)


def _build_saddle(arg):
    _reject_arg("saddle", arg)
    return _entry("saddle", [(2, 0, 0.5), (0, 2, -0.5)], _SQUARE, 0.0)


def _degmax_terms(scale):
    return [(4, 0, -scale), (2, 2, -2.0 * scale), (0, 4, -scale)]


def _build_degmax(arg):
    _reject_arg("degmax", arg)
    return _entry("degmax", _degmax_terms(0.25), _QUARTIC_SQUARE, 0.995)


def _build_degmax_quartic(arg):
    _reject_arg("degmax-quartic", arg)
    return _entry("degmax-quartic", [(4, 0, -1.0), (0, 4, -1.0)],
                  _QUARTIC_SQUARE, 0.0)


def _build_degmax_factored(arg):
    k = _int_arg("degmax-factored", arg, default=3)
    if k < 1:
        raise ConfigInvalid("degmax-factored needs k >= 1")
    w = Window(*_QUARTIC_SQUARE)
    g = GeneratingFunction.from_terms(_degmax_terms(1.0 / (4.0 * k)), w,
                                      twist_bound=0.995 / k)
    return CatalogEntry(f"degmax-factored({k})", (g,) * k, w)


def _build_rigid(arg):
    u = _float_arg("rigid", arg, default=None)
    if u is None:
        raise ConfigInvalid("rigid needs a rotation amount, e.g. "
                            "rigid(0.14) for 0.14 turns")
    if not abs(u) < 1.0 / 6.0:
        raise ConfigInvalid("rigid rotation must satisfy |u| < 1/6 "
                            "of a turn to keep the twist bound")
    # positive u turns counterclockwise; the generator convention is
    # clockwise for positive angle, hence the sign flip
    return _entry(f"rigid({u!r})", rigid_rotation_terms(-2 * math.pi * u),
                  _SQUARE)


_BUILDERS = {
    "shear": _build_shear,
    "elliptic": _build_elliptic,
    "saddle": _build_saddle,
    "degmax": _build_degmax,
    "degmax-quartic": _build_degmax_quartic,
    "degmax-factored": _build_degmax_factored,
    "rigid": _build_rigid,
}

CANONICAL_NAMES = ("shear", "elliptic(0.1)", "saddle", "degmax",
                   "degmax-quartic", "degmax-factored(3)")


def _reject_arg(base, arg):
    if arg is not None:
        raise ConfigInvalid(f"catalog map {base!r} takes no parameter")


def _float_arg(base, arg, default):
    if arg is None:
        return default
    try:
        return float(arg)
    except ValueError:
        raise ConfigInvalid(f"bad numeric parameter {arg!r} for "
                            f"catalog map {base!r}") from None


def _int_arg(base, arg, default):
    if arg is None:
        return default
    try:
        return int(arg)
    except ValueError:
        raise ConfigInvalid(f"bad integer parameter {arg!r} for "
                            f"catalog map {base!r}") from None


def catalog_names():
    """Base names the catalog understands."""
    return tuple(sorted(_BUILDERS))


def get_map(name: str) -> CatalogEntry:
    """Look up a catalog entry by name, e.g. 'degmax' or
    'elliptic(0.25)'. Unknown names are rejected."""
    m = _NAME_RE.match(name.strip())
    if not m:
        raise ConfigInvalid(f"malformed catalog name {name!r}")
    base, arg = m.group(1), m.group(2)
    if base not in _BUILDERS:
        raise ConfigInvalid(
            f"unknown catalog map {base!r}; known: "
            + ", ".join(catalog_names()))
    return _BUILDERS[base](arg)


# ---------------------------------------------------------------------------
# definition files


def definition_dict(entry: CatalogEntry) -> dict:
    """Plain-data form of an entry; floats survive a decimal round
    trip at 17 significant digits.

    Single-factor entries use flat coefficients; factored maps list one
    block per factor."""
    out = {
        "name": entry.name,
        "kind": "polynomial",
        "window": [float(v) for v in entry.window.as_list()],
    }
    blocks = [{
        "coefficients": [[int(i), int(j), float(c)]
                         for i, j, c in g.terms],
        "twist_bound": float(g.twist_bound),
    } for g in entry.factors]
    if len(blocks) == 1:
        out.update(blocks[0])
    else:
        out["factors"] = blocks
    return out


def save_definition(entry: CatalogEntry, path) -> None:
    with open(path, "w") as fh:
        json.dump(definition_dict(entry), fh, indent=2)
        fh.write("\n")


def entry_from_dict(data: dict) -> CatalogEntry:
    """Build an entry from definition-file data.

    kind 'catalog' resolves the name through the catalog; kind
    'polynomial' builds from explicit coefficients. Unknown keys and
    kinds are rejected."""
    if not isinstance(data, dict):
        raise ConfigInvalid("map definition must be a mapping")
    kind = data.get("kind", "polynomial")
    if kind == "catalog":
        extra = set(data) - {"name", "kind"}
        if extra:
            raise ConfigInvalid(
                "unknown definition keys: " + ", ".join(sorted(extra)))
        if "name" not in data:
            raise ConfigInvalid("catalog definition needs a name")
        return get_map(data["name"])
    if kind != "polynomial":
        raise ConfigInvalid(f"unknown definition kind {kind!r}")
    allowed = {"name", "kind", "coefficients", "factors", "window",
               "twist_bound"}
    extra = set(data) - allowed
    if extra:
        raise ConfigInvalid(
            "unknown definition keys: " + ", ".join(sorted(extra)))
    if "window" not in data:
        raise ConfigInvalid("polynomial definition needs a window")
    try:
        w = Window(*[float(v) for v in data["window"]])
    except (TypeError, ValueError):
        raise ConfigInvalid("window must be [xmin, xmax, ymin, ymax]") \
            from None
    if "factors" in data:
        specs = data["factors"]
    elif "coefficients" in data:
        specs = [{"coefficients": data["coefficients"],
                  "twist_bound": data.get("twist_bound")}]
    else:
        raise ConfigInvalid(
            "polynomial definition needs coefficients or factors")
    factors = []
    for spec in specs:
        try:
            terms = [(int(i), int(j), float(c))
                     for i, j, c in spec["coefficients"]]
        except (KeyError, TypeError, ValueError):
            raise ConfigInvalid(
                "coefficients must be [i, j, c] triples") from None
        tb = spec.get("twist_bound")
        try:
            g = GeneratingFunction.from_terms(
                terms, w, twist_bound=None if tb is None else float(tb))
        except Exception as e:
            raise ConfigInvalid(f"definition rejected: {e}") from None
        factors.append(g)
    return CatalogEntry(str(data.get("name", "custom")), tuple(factors), w)


def load_definition(path) -> CatalogEntry:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigInvalid(f"cannot read map definition: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"map definition is not valid JSON: {e}") \
            from None
    return entry_from_dict(data)


def resolve_map(spec) -> CatalogEntry:
    """Accept a catalog name, a definition dict, or a definition-file
    path and produce the entry."""
    if isinstance(spec, CatalogEntry):
        return spec
    if isinstance(spec, dict):
        return entry_from_dict(spec)
    if isinstance(spec, str):
        s = spec.strip()
        if s.endswith(".json") or "/" in s:
            return load_definition(s)
        return get_map(s)
    raise ConfigInvalid(f"cannot interpret map specification {spec!r}")
