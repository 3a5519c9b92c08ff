"""Catalog lookups, audits, and definition-file round trips."""

import json

import numpy as np
import pytest

from pirouette import (ConfigInvalid, GeneratedMap, MapFactorization,
                       get_map, load_definition, resolve_map,
                       save_definition)
from pirouette.catalog import CANONICAL_NAMES, catalog_names


@pytest.mark.parametrize("name", CANONICAL_NAMES + ("rigid(0.14)",))
def test_every_entry_passes_audits(name):
    entry = get_map(name)
    for g in entry.factors:
        g.audit()
    m = entry.map
    pts = entry.window.random_points(60, seed=2)
    checked = 0
    for z in pts:
        try:
            J = m.jacobian(z)
        except Exception:
            continue
        assert abs(np.linalg.det(J) - 1.0) < 1e-12
        checked += 1
    assert checked > 20


def test_entry_shapes():
    assert isinstance(get_map("shear").map, GeneratedMap)
    fac = get_map("degmax-factored(3)")
    assert fac.k == 3
    assert isinstance(fac.map, MapFactorization)
    assert get_map("degmax-factored(3)").factors[0].terms == \
        get_map("degmax-factored(3)").factors[2].terms


def test_parametrized_names():
    a = get_map("elliptic(0.25)")
    assert a.factors[0].d11(0.0, 0.0) == pytest.approx(0.25, abs=1e-12)
    default = get_map("elliptic")
    assert default.factors[0].d11(0.0, 0.0) == pytest.approx(0.1,
                                                             abs=1e-12)
    assert get_map("degmax-factored").k == 3


def test_name_rejection():
    for bad in ("nosuch", "degmax(3)", "rigid", "rigid(0.5)",
                "elliptic(lots)", "degmax-factored(0)", ""):
        with pytest.raises(ConfigInvalid):
            get_map(bad)
    assert "degmax" in catalog_names()


def test_definition_round_trip_exact(tmp_path):
    for name in ("elliptic(0.1)", "degmax", "degmax-factored(2)",
                 "rigid(0.14)"):
        entry = get_map(name)
        path = tmp_path / "map.json"
        save_definition(entry, path)
        back = load_definition(path)
        assert back.k == entry.k
        assert back.window.as_list() == entry.window.as_list()
        for a, b in zip(entry.factors, back.factors):
            assert a.terms == b.terms
            assert a.twist_bound == b.twist_bound


def test_definition_field_layout(tmp_path):
    path = tmp_path / "m.json"
    save_definition(get_map("saddle"), path)
    raw = json.loads(path.read_text())
    assert raw["kind"] == "polynomial"
    assert set(raw) == {"name", "kind", "coefficients", "window",
                        "twist_bound"}
    save_definition(get_map("degmax-factored(2)"), path)
    raw = json.loads(path.read_text())
    assert set(raw) == {"name", "kind", "factors", "window"}


def test_definition_rejects_unknown_keys(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({
        "name": "x", "kind": "polynomial",
        "coefficients": [[0, 2, 0.5]],
        "window": [-1, 1, -1, 1], "surprise": 1}))
    with pytest.raises(ConfigInvalid):
        load_definition(path)
    path.write_text(json.dumps({"kind": "sinusoidal"}))
    with pytest.raises(ConfigInvalid):
        load_definition(path)
    path.write_text("not json")
    with pytest.raises(ConfigInvalid):
        load_definition(path)


def test_catalog_kind_resolution(tmp_path):
    path = tmp_path / "ref.json"
    path.write_text(json.dumps({"kind": "catalog", "name": "saddle"}))
    entry = load_definition(path)
    assert entry.name == "saddle"


def test_resolve_map_accepts_all_spellings(tmp_path):
    assert resolve_map("shear").name == "shear"
    path = tmp_path / "m.json"
    save_definition(get_map("shear"), path)
    assert resolve_map(str(path)).factors[0].terms == \
        get_map("shear").factors[0].terms
    assert resolve_map({"kind": "catalog", "name": "shear"}).name == \
        "shear"
    with pytest.raises(ConfigInvalid):
        resolve_map(42)
