"""The built-in coframe generators: determinism, registry, oracle tables."""

import math

import pytest

from bicontact.examples import EXAMPLES, ExampleSpec, build_example
from bicontact.pipeline import (Tolerances, analyze, cartan_structure_check,
                                compute_C, compute_C3, one_adapt)
from conftest import box_points

TOL = Tolerances()
ALL_NAMES = {"hyp_c3", "torus_constC", "normal_form_3d", "eta_frame",
             "fourd_ezero", "fourd_enonzero", "sphere_frame"}


def test_registry_is_complete_and_consistent():
    assert set(EXAMPLES) == ALL_NAMES
    for name in ALL_NAMES:
        spec = build_example(name)
        assert isinstance(spec, ExampleSpec)
        assert spec.name == name
        dim = spec.chart.dim
        assert dim in (3, 4)
        assert len(spec.rows) == dim
        assert len(spec.box) == dim
        for lo, hi in spec.box:
            assert lo < hi
        assert spec.notes


def test_build_example_unknown_name():
    with pytest.raises(KeyError, match="sphere_frame"):
        build_example("no_such_example")


def test_generators_are_deterministic():
    for name in ALL_NAMES:
        a = build_example(name)
        b = build_example(name)
        assert a.rows == b.rows
        assert a.params == b.params
        assert a.expected == b.expected
        assert a.input_text() == b.input_text()


def test_parameters_change_the_rows():
    base = build_example("hyp_c3")
    other = build_example("hyp_c3", c3="1+z^2")
    assert base.rows != other.rows
    assert other.expected["C3"] == "1+z^2"
    assert build_example("torus_constC", psi=0.5).expected["C"] == \
        pytest.approx(math.sinh(1.0))


def test_hyp_c3_third_derivative_table():
    spec = build_example("hyp_c3", c3="1+z^2")
    pts = box_points(spec.box, 4, seed=51)
    fld = one_adapt(spec.coframes(), pts, 7, TOL)
    for p in pts:
        cf = fld.at(p, 7)
        C = compute_C(cf)
        C3, _, _ = compute_C3(cf, C)
        assert C3.value == pytest.approx(1.0 + p[2] ** 2, abs=1e-9)


def test_sphere_frame_reduces_with_unit_K():
    spec = build_example("sphere_frame")
    pts = box_points(spec.box, 4, seed=52)
    fld = one_adapt(spec.coframes(), pts, 7, TOL)
    out = cartan_structure_check(fld, pts, 7, TOL)
    assert out is not None
    assert out["eps"] == -1
    for K, res in zip(out["K"], out["residuals"]):
        assert K == pytest.approx(1.0, abs=1e-8)
        assert max(res.values()) < 1e-8


def test_generic_frames_do_not_reduce():
    spec = build_example("eta_frame")
    pts = box_points(spec.box, 3, seed=53)
    fld = one_adapt(spec.coframes(), pts, 7, TOL)
    assert cartan_structure_check(fld, pts, 7, TOL) is None


def test_expected_epsilon_matches_analysis():
    for name in ("hyp_c3", "torus_constC", "normal_form_3d", "eta_frame",
                 "sphere_frame"):
        spec = build_example(name)
        pts = box_points(spec.box, 3, seed=54)
        out = analyze(spec.coframes(), pts, 7, TOL)
        assert out["eps"] == spec.expected["eps"], name


def test_input_text_has_all_sections():
    for name in ALL_NAMES:
        spec = build_example(name)
        text = spec.input_text()
        assert text.startswith("[chart]\ncoords = ")
        for i in range(1, spec.chart.dim + 1):
            assert f"[omega{i}]" in text
        if spec.params:
            assert "[params]" in text
