from dataclasses import replace
import math

import numpy as np
import pytest

from pinterp.harness import (CSV_COLUMNS, CheckReport, ConvergenceRecord, TestField, catalog,
                             check_commuting, check_preserve, emit_csv, fit_rate, get_field,
                             read_csv, run_convergence)
from pinterp.spaces import build_vector_space

X = np.array([[0.0, 0.5], [-0.5, 0.3], [0.4, 0.9]])


def _records(errs, ps=None):
    ps = range(1, len(errs) + 1) if ps is None else ps
    return [ConvergenceRecord("pi1", "synthetic", int(p), e, e, e, 1.0, 0.0)
            for p, e in zip(ps, errs)]


def test_catalog_contents():
    names = {f.name for f in catalog()}
    for n in ("rho^0.6", "rho^1.5", "rho^2.5", "grad_rho^1.5", "edge_power^1.5", "trig",
              "trig_vector", "grad_x1x2"):
        assert n in names
    rho = get_field("rho", 1.5)
    assert rho.regularity == 1.5 and rho.sharp and rho.justification
    assert rho.singular == ("vertex", 0)


def test_catalog_derivatives():
    f = get_field("edge_power", 1.5)
    np.testing.assert_allclose(f.curl(X), -2.5 * X[:, 1] ** 1.5)
    np.testing.assert_allclose(f.value(X)[:, 0], X[:, 1] ** 2.5)
    g = next(f for f in catalog() if f.name == "grad_x1x2")
    np.testing.assert_allclose(g.curl(X), 0.0)
    np.testing.assert_allclose(g.value(X), X[:, ::-1])
    for fld in catalog():
        # analytic derivatives agree with centered differences away from singularities
        h = 1e-6
        if fld.kind == "scalar" and fld.grad is not None:
            fd = np.column_stack([(fld.value(X + e) - fld.value(X - e)) / (2 * h)
                                  for e in (np.array([h, 0]), np.array([0, h]))])
            np.testing.assert_allclose(fld.grad(X), fd, atol=1e-6)
        if fld.kind == "vector" and fld.curl is not None:
            ex, ey = np.array([h, 0]), np.array([0, h])
            d1u2 = (fld.value(X + ex)[:, 1] - fld.value(X - ex)[:, 1]) / (2 * h)
            d2u1 = (fld.value(X + ey)[:, 0] - fld.value(X - ey)[:, 0]) / (2 * h)
            np.testing.assert_allclose(fld.curl(X), d1u2 - d2u1, atol=1e-6)


def test_rotated_field():
    f = get_field("edge_power", 1.5)
    r = f.rotated()
    np.testing.assert_allclose(r.value(X), np.column_stack([f.value(X)[:, 1], -f.value(X)[:, 0]]))
    np.testing.assert_allclose(r.div(X), f.curl(X))
    with pytest.raises(ValueError):
        get_field("rho", 1.5).rotated()
    with pytest.raises(KeyError):
        get_field("nope")


def test_fit_rate_synthetic():
    ps = np.arange(3, 17)
    fit = fit_rate(_records(ps ** -2.0, ps))
    assert fit.slope == pytest.approx(-2.0, abs=1e-12)
    assert fit.monotone and not fit.flags
    fit = fit_rate(_records(3 * ps ** -0.5, ps))
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    bumpy = 1.0 / ps
    bumpy[4] *= 3
    assert "non-monotone" in fit_rate(_records(bumpy, ps)).flags
    zero = 1.0 / ps
    zero[-1] = 0.0
    assert "zero errors" in fit_rate(_records(zero, ps)).flags
    with pytest.raises(ValueError):
        fit_rate(_records([1, 0.5, 0.2]))


def test_csv_round_trip(tmp_path):
    recs = [ConvergenceRecord("picurl", "edge_power^1.5", p, math.pi / p, 1 / 3, 2.0 ** -p,
                              1.23456789012345678, 0.1 * p) for p in range(1, 4)]
    path = tmp_path / "r.csv"
    emit_csv(recs[:1], path)
    assert path.read_text().count("\n") == 2
    emit_csv(recs, path)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert text.endswith("\n")
    assert read_csv(path) == recs
    with pytest.raises(ValueError):
        emit_csv([], path)
    with pytest.raises(OSError):
        emit_csv(recs, tmp_path / "missing" / "r.csv")


def test_run_convergence_affine_and_mismatch():
    f = get_field("rho", 1.5)
    aff = next(f for f in catalog() if f.name == "affine")
    recs = run_convergence("pi1", aff, [1, 3, 5])
    assert max(r.err_h1semi for r in recs) <= 1e-10
    with pytest.raises(ValueError):
        run_convergence("picurl", f, [1, 2])
    with pytest.raises(ValueError):
        run_convergence("pi2", f, [1, 2])
    with pytest.raises(ValueError):
        run_convergence("pi1", f, [2, 2])


def test_run_convergence_records():
    f = get_field("edge_power", 1.5)
    recs = run_convergence("picurl", f, [4, 2, 3], jobs=2)
    assert [r.p for r in recs] == [2, 3, 4]
    for r in recs:
        assert min(r.err_l2, r.err_h1semi, r.err_graph) >= 0
        assert r.err_graph ** 2 >= r.err_l2 ** 2
    assert recs[0].err_graph > recs[-1].err_graph


def test_ned_polynomial_graph_error():
    V = build_vector_space("triangle", 3)
    c = np.random.default_rng(0).standard_normal(V.dim)
    fld = TestField("poly", "vector", lambda x: V.evaluate(c, x), curl=lambda x: V.curl(c, x))
    recs = run_convergence("picurl", fld, [3, 4, 5])
    assert max(r.err_graph for r in recs) <= 1e-8 * recs[0].ref_norm


def test_determinism(tmp_path):
    f = get_field("rho", 1.5)
    out = []
    for k in range(2):
        # wall-clock seconds are the only non-deterministic column
        recs = [replace(r, seconds=0.0) for r in run_convergence("pi1", f, [2, 3, 4])]
        emit_csv(recs, tmp_path / f"{k}.csv")
        out.append((tmp_path / f"{k}.csv").read_bytes())
    assert out[0] == out[1]


def test_check_report():
    rep = CheckReport("demo", {"a": 1e-12, "b": 0.5, "c": True}, {"a": 1e-10, "b": (0, 1), "c": True})
    assert rep.passed
    assert all(line.startswith("PASS") for line in rep.lines())
    rep.values["b"] = 2.0
    assert not rep.passed


@pytest.mark.parametrize("kind", ["triangle", "square"])
def test_small_checks(kind):
    assert check_commuting(2, probe_count=2, element=kind).passed
    assert check_preserve(2, count=3, element=kind).passed
