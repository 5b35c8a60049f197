"""Test fields, convergence studies, rate fitting and identity checks."""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, fields, replace
import math
import time

import numpy as np
from scipy import stats

from .approx1d import approx_endpoint_matched, corrector_norms, endpoint_correctors
from .extension import BoundaryTrace, discrete_harmonic_extend
from .geometry import as_element
from .interpolation import pi0, pi1, picurl, pidiv
from .modal import ModalField, modal_basis
from .poincare import A_polynomial, R_polynomial, default_kernel, regular_decompose
from .quadrature import QuadConfig, element_rule, graded_interval_rule
from .sobolev import (build_oracle_space, fractional_norm, interval_sobolev,
                      oracle_degree)
from .spaces import (build_scalar_space, build_vector_space, companion_degree,
                     differential_matrix)

OPERATORS = ("pi0", "pi1", "picurl", "pidiv")
DEFAULT_ALPHAS = (0.6, 1.5, 2.5)


# ------------------------------------------------------------------ fields


@dataclass(frozen=True, eq=False)
class TestField:
    """A scalar or vector test function with analytic derivatives.

    ``regularity`` is the exponent r of the Sobolev label (H^{1+r} for
    scalars, H^r(curl) for vectors); ``sharp`` means the label holds for
    every r below the value but not at it.
    """

    name: str
    kind: str
    value: object
    grad: object = None
    curl: object = None
    div: object = None
    regularity: float = math.inf
    sharp: bool = False
    justification: str = ""
    singular: tuple = None
    element: str = "triangle"

    __test__ = False  # not a pytest class

    def quad(self, **kw):
        return QuadConfig(singular=self.singular, **kw)

    def rotated(self):
        """rot u = (u2, -u1); its divergence is curl u and its curl is -div u."""
        if self.kind != "vector":
            raise ValueError("only vector fields can be rotated")
        u, c, d = self.value, self.curl, self.div

        def value(x):
            v = u(x)
            return np.column_stack([v[:, 1], -v[:, 0]])

        neg_div = None if d is None else (lambda x: -d(x))
        return replace(self, name=f"rot({self.name})", value=value, curl=neg_div, div=c)


def _zero(x):
    return np.zeros(len(x))


def _vertex_power(element, alpha, vertex=0):
    v0 = as_element(element).vertices[vertex]

    def value(x):
        return np.linalg.norm(x - v0, axis=1) ** alpha

    def grad(x):
        d = x - v0
        r = np.linalg.norm(d, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(r > 0, alpha * r ** (alpha - 2.0), 0.0)
        return s[:, None] * d

    def lap(x):
        r = np.linalg.norm(x - v0, axis=1)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, alpha ** 2 * r ** (alpha - 2.0), 0.0)

    return value, grad, lap


def _edge_distance(element):
    """Distance to edge 0 (the bottom edge) and its x2-derivative (1)."""
    el = as_element(element)
    bottom = el.vertices[0][1]
    return lambda x: x[:, 1] - bottom


def catalog(element="triangle", alphas=DEFAULT_ALPHAS):
    """Test fields on ``element``."""
    el = as_element(element).kind
    out = [
        TestField("affine", "scalar",
                  lambda x: 2.0 * x[:, 0] - x[:, 1] + 0.5,
                  grad=lambda x: np.tile([2.0, -1.0], (len(x), 1)),
                  justification="polynomial", element=el),
        TestField("trig", "scalar",
                  lambda x: np.sin(1.5 * x[:, 0] + 0.3) * np.cos(x[:, 1]),
                  grad=lambda x: np.column_stack([
                      1.5 * np.cos(1.5 * x[:, 0] + 0.3) * np.cos(x[:, 1]),
                      -np.sin(1.5 * x[:, 0] + 0.3) * np.sin(x[:, 1])]),
                  justification="entire function", element=el),
        TestField("trig_vector", "vector",
                  lambda x: np.column_stack([np.sin(x[:, 1] + 0.2) * np.cos(x[:, 0]),
                                             np.exp(0.5 * x[:, 0]) * np.sin(x[:, 1])]),
                  curl=lambda x: 0.5 * np.exp(0.5 * x[:, 0]) * np.sin(x[:, 1])
                  - np.cos(x[:, 1] + 0.2) * np.cos(x[:, 0]),
                  div=lambda x: -np.sin(x[:, 1] + 0.2) * np.sin(x[:, 0])
                  + np.exp(0.5 * x[:, 0]) * np.cos(x[:, 1]),
                  justification="entire components", element=el),
        TestField("grad_x1x2", "vector",
                  lambda x: np.column_stack([x[:, 1], x[:, 0]]),
                  curl=_zero, div=_zero, justification="gradient of x1 x2", element=el),
    ]
    for a in alphas:
        out.append(vertex_power(el, a))
        out.append(grad_vertex_power(el, a))
        out.append(edge_power(el, a))
    return out


def vertex_power(element, alpha):
    value, grad, _ = _vertex_power(element, alpha)
    return TestField(f"rho^{alpha:g}", "scalar", value, grad=grad, regularity=alpha,
                     sharp=True,
                     justification="rho^a lies in H^(1+s) near a corner exactly for s < a",
                     singular=("vertex", 0), element=as_element(element).kind)


def grad_vertex_power(element, alpha):
    _, grad, lap = _vertex_power(element, alpha)
    return TestField(f"grad_rho^{alpha:g}", "vector", grad, curl=_zero, div=lap,
                     regularity=alpha, sharp=True,
                     justification="gradient of rho^a: H^r(curl) for r < a, curl-free",
                     singular=("vertex", 0), element=as_element(element).kind)


def edge_power(element, alpha):
    d = _edge_distance(element)
    return TestField(
        f"edge_power^{alpha:g}", "vector",
        lambda x: np.column_stack([d(x) ** (alpha + 1.0), np.zeros(len(x))]),
        curl=lambda x: -(alpha + 1.0) * d(x) ** alpha,
        div=_zero, regularity=alpha, sharp=True,
        justification="(d^(a+1), 0) with d the distance to an edge; curl = -(a+1) d^a "
                      "lies in H^s for s < a + 1/2, so the field is in H^r(curl) for r < a",
        singular=("edge", 0), element=as_element(element).kind)


_FAMILIES = {"rho": vertex_power, "grad_rho": grad_vertex_power, "edge_power": edge_power}


def get_field(name, alpha=None, element="triangle"):
    """Look up a field by name; parametrized families take ``alpha``."""
    if name in _FAMILIES:
        return _FAMILIES[name](element, 1.5 if alpha is None else float(alpha))
    for f in catalog(element, () if alpha is None else (float(alpha),)):
        if f.name == name:
            return f
    raise KeyError(f"unknown field {name!r}")


# --------------------------------------------------------------- convergence


@dataclass(frozen=True)
class ConvergenceRecord:
    operator: str
    field: str
    p: int
    err_l2: float
    err_h1semi: float
    err_graph: float
    ref_norm: float
    seconds: float


CSV_COLUMNS = tuple(f.name for f in fields(ConvergenceRecord))


def _sq_norm(rule, values):
    v = np.asarray(values)
    return float(rule.integrate(v ** 2 if v.ndim == 1 else np.sum(v ** 2, axis=-1)))


def _check_compatible(op, field):
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}")
    if op == "pi1" and field.kind != "scalar":
        raise ValueError("pi1 needs a scalar field")
    if op == "picurl" and (field.kind != "vector" or field.curl is None):
        raise ValueError("picurl needs a vector field with a curl")
    if op == "pidiv" and (field.kind != "vector" or field.div is None):
        raise ValueError("pidiv needs a vector field with a divergence")


def _one_record(op, field, p, quad, family):
    el = field.element
    t0 = time.perf_counter()
    ref_quad = quad.refined()
    rule = ref_quad.element_rule(el, p)
    x = rule.points
    u = field.value(x)
    if op in ("pi0", "pi1"):
        if op == "pi0":
            approx = pi0(field.value, el, p, quad)
            val, grad = approx(x), approx.gradient(x) if field.kind == "scalar" else None
        else:
            parts = pi1(field.value, el, p, quad)
            val, grad = parts.evaluate(x), parts.gradient(x)
        l2 = _sq_norm(rule, u - val)
        ref = _sq_norm(rule, u)
        semi = 0.0
        if field.grad is not None and grad is not None:
            g = field.grad(x)
            semi = _sq_norm(rule, g - grad)
            ref += _sq_norm(rule, g)
    else:
        if op == "picurl":
            parts = picurl(field.value, field.curl, el, p, family, quad)
            d_exact, d_approx = field.curl(x), parts.curl(x)
        else:
            parts = pidiv(field.value, field.div, el, p, family, quad)
            d_exact, d_approx = field.div(x), parts.div(x)
        l2 = _sq_norm(rule, u - parts.evaluate(x))
        semi = _sq_norm(rule, d_exact - d_approx)
        ref = _sq_norm(rule, u) + _sq_norm(rule, d_exact)
    secs = time.perf_counter() - t0
    return ConvergenceRecord(op, field.name, int(p), math.sqrt(l2), math.sqrt(semi),
                             math.sqrt(l2 + semi), math.sqrt(ref), secs)


def run_convergence(op, field, p_list, quad=None, family=None, jobs=1):
    """One record per p (sorted ascending).  Errors are measured with the
    refined version of the field's quadrature."""
    _check_compatible(op, field)
    ps = sorted(int(p) for p in p_list)
    if len(set(ps)) != len(ps):
        raise ValueError("p values must be distinct")
    if quad is None:
        quad = field.quad()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda p: _one_record(op, field, p, quad, family), ps))
    return [_one_record(op, field, p, quad, family) for p in ps]


@dataclass(frozen=True)
class RateFit:
    slope: float
    halfwidth: float  # 95% confidence half-width of the slope
    intercept: float
    n: int
    monotone: bool
    flags: tuple

    def __str__(self):
        extra = f" [{', '.join(self.flags)}]" if self.flags else ""
        return f"slope {self.slope:.4f} +/- {self.halfwidth:.4f} (n={self.n}){extra}"


def fit_rate(records, column="err_h1semi", p_min=3):
    """Least-squares slope of log(error) against log(p) with a 95% band."""
    rows = [r for r in records if r.p >= p_min]
    if len(rows) < 4:
        raise ValueError("need at least 4 records with p >= p_min")
    p = np.array([r.p for r in rows], dtype=float)
    e = np.array([getattr(r, column) for r in rows], dtype=float)
    flags = []
    if np.any(e <= 0):
        flags.append("zero errors")
    keep = e > 0
    monotone = bool(np.all(np.diff(e) < 0))
    if not monotone:
        flags.append("non-monotone")
    if keep.sum() < 3:
        return RateFit(math.nan, math.nan, math.nan, int(keep.sum()), monotone, tuple(flags))
    res = stats.linregress(np.log(p[keep]), np.log(e[keep]))
    n = int(keep.sum())
    half = float(stats.t.ppf(0.975, n - 2) * res.stderr)
    return RateFit(float(res.slope), half, float(res.intercept), n, monotone, tuple(flags))


def emit_csv(records, path):
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            vals = [r.operator, r.field, str(r.p)]
            vals += [format(getattr(r, c), ".17g") for c in CSV_COLUMNS[3:]]
            fh.write(",".join(vals) + "\n")


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError("unexpected CSV header")
        return [ConvergenceRecord(row["operator"], row["field"], int(row["p"]),
                                  *(float(row[c]) for c in CSV_COLUMNS[3:]))
                for row in reader]


# ------------------------------------------------------------------ checks


@dataclass
class CheckReport:
    name: str
    values: dict
    tolerances: dict

    @property
    def passed(self):
        return all(_ok(self.values[k], tol) for k, tol in self.tolerances.items())

    def lines(self):
        out = []
        for k, tol in self.tolerances.items():
            v = self.values[k]
            status = "PASS" if _ok(v, tol) else "FAIL"
            out.append(f"{status} {self.name}: {k} = {_fmt(v)} (tol {_fmt(tol)})")
        return out


def _ok(value, tol):
    if isinstance(tol, tuple):
        return tol[0] <= value <= tol[1]
    if isinstance(tol, bool):
        return value == tol
    return value <= tol


def _fmt(v):
    if isinstance(v, tuple):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, bool):
        return str(v)
    return f"{v:.3e}" if isinstance(v, float) else str(v)


def trig_probe(rng):
    """Random smooth vector field with analytic curl and divergence."""
    a = rng.uniform(-1.5, 1.5, size=(2, 2))
    b = rng.uniform(-1.0, 1.0, size=2)

    def value(x):
        s0 = x @ a[0] + b[0]
        s1 = x @ a[1] + b[1]
        return np.column_stack([np.sin(s0), np.cos(s1)])

    def curl(x):
        return -np.sin(x @ a[1] + b[1]) * a[1, 0] - np.cos(x @ a[0] + b[0]) * a[0, 1]

    def div(x):
        return np.cos(x @ a[0] + b[0]) * a[0, 0] - np.sin(x @ a[1] + b[1]) * a[1, 1]

    return value, curl, div


def scalar_trig_probe(rng):
    a = rng.uniform(-1.5, 1.5, size=2)
    b = rng.uniform(-1.0, 1.0)

    def value(x):
        return np.sin(x @ a + b)

    def grad(x):
        return np.cos(x @ a + b)[:, None] * a

    return value, grad


def _modal_l2_diff(c_a, c_b):
    n = max(len(c_a), len(c_b))
    d = np.zeros(n)
    d[:len(c_a)] += c_a
    d[:len(c_b)] -= c_b
    return float(np.linalg.norm(d))


def check_commuting(p, probe_count=10, seed=0, element="triangle", family=None,
                    quad=None, tol=1e-8):
    """Residuals of the commuting-diagram identities on random trig probes:
    curl path, gradient path (coefficients), div path and its rotated
    gradient path."""
    el = as_element(element)
    quad = quad or QuadConfig()
    rng = np.random.default_rng(seed)
    V = build_vector_space(el, p, family)
    fam = V.family
    q = companion_degree(fam, p)
    W = build_scalar_space(el, q)
    G = differential_matrix(W, V, "grad")
    div_family = "BDM" if fam == "Ned2" else "RT"
    Vd = build_vector_space(el, p, div_family)
    Cs = differential_matrix(W, Vd, "curl_scalar")
    worst = dict(curl=0.0, grad=0.0, div=0.0, curl_scalar=0.0)
    for _ in range(probe_count):
        u, cu, du = trig_probe(rng)
        parts = picurl(u, cu, el, p, fam, quad)
        ref = pi0(cu, el, p - 1, quad)
        r = _modal_l2_diff(V.curl_modal @ parts.total, ref.coeffs)
        rule = element_rule(el.kind, quad.degree(p))
        scale = max(1.0, math.sqrt(_sq_norm(rule, cu(rule.points))))
        worst["curl"] = max(worst["curl"], r / scale)
        dparts = pidiv(u, du, el, p, div_family, quad)
        dref = pi0(du, el, p - 1, quad)
        r = _modal_l2_diff(Vd.div_modal @ dparts.total, dref.coeffs)
        worst["div"] = max(worst["div"], r / scale)

        psi, gpsi = scalar_trig_probe(rng)
        h1 = pi1(psi, el, q, quad)
        cp = picurl(gpsi, _zero, el, p, fam, quad)
        lhs, rhs = cp.total, G @ h1.total
        worst["grad"] = max(worst["grad"],
                            float(np.abs(lhs - rhs).max() / max(1.0, np.abs(rhs).max())))

        def curl_psi(x):
            g = gpsi(x)
            return np.column_stack([g[:, 1], -g[:, 0]])

        dp = pidiv(curl_psi, _zero, el, p, div_family, quad)
        rhs = Cs @ h1.total
        worst["curl_scalar"] = max(worst["curl_scalar"],
                                   float(np.abs(dp.total - rhs).max() / max(1.0, np.abs(rhs).max())))
    tols = {k: tol for k in worst}
    return CheckReport(f"diagram p={p} {el.kind}", worst, tols)


def random_polynomial_fields(element, p, count, seed=0, family=None):
    """``count`` random members of P_p and of the Nedelec space of order p."""
    rng = np.random.default_rng(seed)
    S = build_scalar_space(element, p)
    V = build_vector_space(element, p, family)
    return ([rng.standard_normal(S.dim) for _ in range(count)],
            [rng.standard_normal(V.dim) for _ in range(count)], S, V)


def check_preserve(p, count=20, seed=0, element="triangle", family=None, tol=1e-8):
    """Relative coefficient errors of pi1, picurl and pidiv on random members
    of their target spaces."""
    el = as_element(element)
    scal, vec, S, V = random_polynomial_fields(el, p, count, seed, family)
    worst = dict(pi1=0.0, picurl=0.0, pidiv=0.0)
    div_family = "BDM" if V.family == "Ned2" else "RT"
    D = build_vector_space(el, p, div_family)
    for c in scal:
        parts = pi1(lambda x: S.evaluate(c, x), el, p)
        worst["pi1"] = max(worst["pi1"], float(np.abs(parts.total - c).max() / np.abs(c).max()))
    for c in vec:
        parts = picurl(lambda x: V.evaluate(c, x), lambda x: V.curl(c, x), el, p, V.family)
        worst["picurl"] = max(worst["picurl"],
                              float(np.abs(parts.total - c).max() / np.abs(c).max()))
        parts = pidiv(lambda x: D.evaluate(c, x), lambda x: D.div(c, x), el, p, div_family)
        worst["pidiv"] = max(worst["pidiv"],
                             float(np.abs(parts.total - c).max() / np.abs(c).max()))
    return CheckReport(f"preserve p={p} {el.kind}", worst, {k: tol for k in worst})


def check_poincare(max_degree=10, seed=0, element="triangle", npts=20):
    """(R1), (A1) and regular-decomposition residuals."""
    el = as_element(element)
    rng = np.random.default_rng(seed)
    kernel = default_kernel(el)
    pts = _interior_points(el, npts, rng)
    r1 = a1 = 0.0
    for q in range(0, max_degree + 1):
        deg = q if el.kind == "triangle" else q // 2
        psi = ModalField(el.kind, deg, rng.standard_normal(modal_basis(el.kind, deg).dim))
        Rpsi = R_polynomial(psi, kernel, el, deg)
        r1 = max(r1, float(np.abs(Rpsi.curl(pts) - psi(pts)).max()))
        phi = ModalField(el.kind, deg + 1, rng.standard_normal(modal_basis(el.kind, deg + 1).dim))
        Au = A_polynomial(phi.gradient, kernel, el, deg)
        a1 = max(a1, float(np.abs(Au.gradient(pts) - phi.gradient(pts)).max()))

    rotational = (lambda x: np.column_stack([-x[:, 1], x[:, 0]]), lambda x: np.full(len(x), 2.0))
    dec = regular_decompose(*rotational, kernel, el, degree=1)
    poly_res = dec.residual(rotational[0], pts)
    smooth = (lambda x: np.column_stack([np.sin(x[:, 1]), np.zeros(len(x))]),
              lambda x: -np.cos(x[:, 1]))
    dec = regular_decompose(*smooth, kernel, el)
    smooth_res = dec.residual(smooth[0], pts)
    values = dict(R1=r1, A1=a1, decomposition_polynomial=poly_res,
                  decomposition_smooth=smooth_res)
    tols = dict(R1=1e-9, A1=1e-9, decomposition_polynomial=1e-8, decomposition_smooth=1e-6)
    return CheckReport(f"poincare {el.kind}", values, tols)


def _interior_points(el, n, rng):
    pts = []
    while len(pts) < n:
        x = rng.uniform(-1.0, 1.0, size=2) * [1.0, 1.0] + ([0.0, 0.9] if el.kind == "triangle" else 0.0)
        if el.contains(x[None, :])[0]:
            pts.append(x)
    return np.array(pts)


def htilde_half_error(f, fp, p, singular_end="left"):
    """Discrete H~^{1/2} norm of f - f_p after subtracting its affine
    endpoint interpolant."""
    P = oracle_degree(p)
    oracle = build_oracle_space(0, P)
    ends = np.asarray(f(np.array([-1.0, 1.0]))) - fp(np.array([-1.0, 1.0]))

    def err(t):
        return f(t) - fp(t) - (ends[0] * (1 - t) + ends[1] * (1 + t)) / 2

    rule = graded_interval_rule(2 * P, ends=singular_end)
    return fractional_norm(oracle.project_samples(err(rule.points), rule), oracle, 0.5)


def corrector_slopes(p_values=range(4, 65), P=128):
    """Fitted growth exponents of |psi_p^+| in H^s for s = 0, 1/2, 1."""
    ps = np.array(list(p_values), dtype=float)
    sob = interval_sobolev(P)
    l2, h1 = zip(*(corrector_norms(int(p)) for p in ps))
    half = [sob.norm(sob.legendre_project(endpoint_correctors(int(p))[1]), 0.5) for p in ps]
    lp = np.log(ps)
    return {s: float(np.polyfit(lp, np.log(v), 1)[0])
            for s, v in ((0.0, l2), (0.5, half), (1.0, h1))}


def check_approx1d(exponent=0.9):
    f = lambda x: (1.0 + x) ** exponent  # noqa: E731
    probes = [f, np.exp, lambda x: np.abs(x - 0.3)]
    end_err = 0.0
    for g in probes:
        for p in (1, 2, 5, 17):
            fp = approx_endpoint_matched(g, p)
            end_err = max(end_err, float(np.abs(fp(np.array([-1.0, 1.0]))
                                                - g(np.array([-1.0, 1.0]))).max()))
    slopes = corrector_slopes()
    ps = [4, 6, 8, 12, 16, 24, 32]
    errs = [htilde_half_error(f, approx_endpoint_matched(f, p), p) for p in ps]
    rate = float(np.polyfit(np.log(ps), np.log(errs), 1)[0])
    values = {"endpoint error": end_err, "H^1/2 error slope": rate}
    tols = {"endpoint error": 1e-12, "H^1/2 error slope": -(exponent - 0.15)}
    for s, v in slopes.items():
        values[f"corrector slope s={s:g}"] = v
        tols[f"corrector slope s={s:g}"] = (s - 0.5 - 0.1, s - 0.5 + 0.1)
    return CheckReport("approx1d", values, tols)


def extension_checks(element="triangle", seed=0, p_range=range(4, 17)):
    """Exactness for linear traces, Pythagoras identity, monotonicity in p."""
    el = as_element(element)
    rng = np.random.default_rng(seed)
    affine = lambda x: 0.7 * x[:, 0] - 1.3 * x[:, 1] + 0.25  # noqa: E731
    tr = BoundaryTrace.from_function(el, affine, 1)
    pts = _interior_points(el, 20, rng)
    exact = 0.0
    for p in range(1, 9):
        S = build_scalar_space(el, p)
        c = discrete_harmonic_extend(el, p, tr)
        exact = max(exact, float(np.abs(S.evaluate(c, pts) - affine(pts)).max()))
    pyth = 0.0
    trace_fn = lambda x: x[:, 0] ** 2 * x[:, 1] - x[:, 1] ** 3 + x[:, 0] ** 4  # noqa: E731
    tr4 = BoundaryTrace.from_function(el, trace_fn, 4)
    for p in (4, 6, 8):
        S = build_scalar_space(el, p)
        F = discrete_harmonic_extend(el, p, tr4)
        for _ in range(5):
            Phi = F.copy()
            Phi[S.bubble_idx] += rng.standard_normal(len(S.bubble_idx))
            A = S.stiffness
            lhs = Phi @ A @ Phi
            rhs = (Phi - F) @ A @ (Phi - F) + F @ A @ F
            pyth = max(pyth, abs(lhs - rhs) / lhs)
    seminorms = []
    for p in p_range:
        S = build_scalar_space(el, p)
        F = discrete_harmonic_extend(el, p, tr4)
        seminorms.append(math.sqrt(F @ S.stiffness @ F))
    increase = max(0.0, max(np.diff(seminorms) / seminorms[0]))
    values = {"linear trace exactness": exact, "Pythagoras residual": pyth,
              "max relative increase of |E_p|": float(increase)}
    tols = {"linear trace exactness": 1e-10, "Pythagoras residual": 1e-9,
            "max relative increase of |E_p|": 1e-12}
    return CheckReport(f"extension {el.kind}", values, tols), seminorms


BOUNDEDNESS_PROBES = (("trig_vector", None), ("edge_power", 1.5), ("grad_rho", 1.5),
                      ("grad_rho", 0.6))


def stability_ratios(field, p_list, family=None):
    """||picurl_p u||_{H(curl)} / ||u||_{H(curl)} for each p."""
    quad = field.quad()
    ref_quad = quad.refined()
    out = []
    for p in p_list:
        rule = ref_quad.element_rule(field.element, p)
        x = rule.points
        parts = picurl(field.value, field.curl, field.element, p, family, quad)
        num = _sq_norm(rule, parts.evaluate(x)) + _sq_norm(rule, parts.curl(x))
        den = _sq_norm(rule, field.value(x)) + _sq_norm(rule, field.curl(x))
        out.append(math.sqrt(num / den))
    return np.array(out)


def check_boundedness(p_list=range(1, 17), element="triangle", family=None, band=0.15):
    """Slope of log(ratio) against log(p) for each probe; each must lie
    within ``band`` of zero."""
    ps = np.array(list(p_list), dtype=float)
    values, tols = {}, {}
    for name, alpha in BOUNDEDNESS_PROBES:
        if name == "trig_vector":
            field = next(f for f in catalog(element) if f.name == name)
        else:
            field = get_field(name, alpha, element)
        ratios = stability_ratios(field, [int(p) for p in ps], family)
        slope = float(np.polyfit(np.log(ps), np.log(ratios), 1)[0])
        values[f"{field.name} slope"] = slope
        values[f"{field.name} max/min ratio"] = float(ratios.max() / ratios.min())
        tols[f"{field.name} slope"] = (-band, band)
        tols[f"{field.name} max/min ratio"] = 3.0
    return CheckReport(f"boundedness {as_element(element).kind}", values, tols)
