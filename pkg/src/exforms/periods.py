"""Period integrals over closed parametric chains.

Circulation of a 1-form around a closed curve, the normalized Gauss
linking double integral of two disjoint closed curves, the triple braid
integral over three independently parameterized momentum loops, and the
symbolic Holder-norm current constructions whose closedness makes those
integrals deformation invariants.

Quadrature is composite trapezoid or composite Simpson on the periodic
parameter interval, with optional Richardson refinement.  Integrands are
evaluated on numpy grids; non-finite node values abort with a
singularity error rather than polluting the sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from .errors import (
    ContextMismatchError,
    CurveProximityError,
    DegreeError,
    InputError,
    SingularIntegrandError,
)
from .expressions import ScalarExpr
from .forms import DifferentialForm, VectorField, ext_d, wedge

MIN_CURVE_SEPARATION = 1e-6


@dataclass(frozen=True)
class ClosedCurve:
    """Closed parametric curve: one expression per ambient variable.

    Components must agree at parameter 0 and at the period.  Derivatives
    may be supplied analytically, otherwise they are taken symbolically.
    """

    parameter: str
    period: float
    components: tuple
    derivatives: tuple = None

    def __post_init__(self):
        if self.period <= 0:
            raise InputError("curve period must be positive")
        for c in self.components:
            extra = c.variables() - {self.parameter}
            if extra:
                raise ContextMismatchError(
                    f"curve component uses variables {sorted(extra)} besides "
                    f"'{self.parameter}'"
                )
        for c in self.components:
            lo = c.evaluate({self.parameter: 0.0})
            hi = c.evaluate({self.parameter: self.period})
            if abs(lo - hi) > 1e-9:
                raise InputError(
                    f"curve is not closed: component differs by {hi - lo} over one period"
                )
        if self.derivatives is not None and len(self.derivatives) != len(self.components):
            raise InputError("one derivative per component required")

    @classmethod
    def build(cls, parameter, period, components, derivatives=None):
        comps = tuple(ex._wrap(c) for c in components)
        ders = None if derivatives is None else tuple(ex._wrap(c) for c in derivatives)
        return cls(parameter, float(period), comps, ders)

    @property
    def dimension(self):
        return len(self.components)

    def velocity(self):
        if self.derivatives is not None:
            return self.derivatives
        return tuple(c.diff(self.parameter) for c in self.components)

    def rename_parameter(self, name: str) -> "ClosedCurve":
        if name == self.parameter:
            return self
        sub = {self.parameter: ex.var(name)}
        return ClosedCurve(
            name,
            self.period,
            tuple(c.substitute(sub) for c in self.components),
            None if self.derivatives is None else
            tuple(c.substitute(sub) for c in self.derivatives),
        )

    def reversed(self) -> "ClosedCurve":
        """Same image traversed in the opposite orientation."""
        sub = {self.parameter: ex.sub(ex.const(self.period), ex.var(self.parameter))}
        return ClosedCurve(
            self.parameter,
            self.period,
            tuple(c.substitute(sub).simplify() for c in self.components),
            None,
        )


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = "simpson"            # "simpson" | "trapezoid"
    panels: int = 64
    refinements: int = 0
    tol: float = 1e-10

    def __post_init__(self):
        if self.rule not in ("simpson", "trapezoid"):
            raise InputError(f"unknown quadrature rule '{self.rule}'")
        if self.panels < 8:
            raise InputError("closed-curve rules need at least 8 panels")
        if self.refinements < 0:
            raise InputError("refinement count must be >= 0")


@dataclass(frozen=True)
class SignatureSpec:
    """Signs, coefficients and exponent of the Holder form

        lambda = (s_1 a_1 u_1^p + s_2 a_2 u_2^p + ...)^(n/p)

    Every signature of interest keeps at least one plus sign; p >= 1.
    """

    signs: tuple = (1, 1, 1)
    p: float = 2.0
    coefficients: tuple = None

    def __post_init__(self):
        if not any(s > 0 for s in self.signs):
            raise InputError("signature needs at least one + sign")
        if self.p < 1:
            raise InputError("exponent p must be >= 1")
        if self.coefficients is not None and len(self.coefficients) != len(self.signs):
            raise InputError("one coefficient per sign required")

    def coefficient(self, i: int) -> float:
        base = 1.0 if self.coefficients is None else self.coefficients[i]
        return self.signs[i] * base

    def lam(self, terms, n: int) -> ScalarExpr:
        """The signed p-norm power for n-dimensional volume normalization."""
        if len(terms) > len(self.signs):
            raise InputError("signature is shorter than the component list")
        acc = ex.ZERO
        for i, u in enumerate(terms):
            acc = ex.add(acc, ex.mul(ex.const(self.coefficient(i)), ex.power(u, self.p)))
        return ex.power(acc, n / self.p)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float = None     # None when no refinement was requested
    convergence: tuple = ()          # ((panels, value), ...) raw rule values

    def __float__(self):
        return self.value


# -- quadrature drivers -----------------------------------------------------------


def _nodes_weights(rule: str, panels: int, period: float):
    if rule == "trapezoid":
        n = panels
        h = period / n
        t = np.arange(n + 1) * h
        w = np.full(n + 1, h)
        w[0] = w[-1] = h / 2.0
        return t, w
    n = 2 * panels
    h = period / n
    t = np.arange(n + 1) * h
    w = np.empty(n + 1)
    w[0] = w[-1] = h / 3.0
    w[1:-1:2] = 4.0 * h / 3.0
    w[2:-1:2] = 2.0 * h / 3.0
    return t, w


def _check_finite(values, nodes, parameter_names):
    flat = np.asarray(values)
    bad = ~np.isfinite(flat)
    if bad.any():
        idx = np.argwhere(bad)[0]
        if len(parameter_names) == 1:
            at = float(nodes[0][idx[0]])
            detail = f"{parameter_names[0]} = {at}"
            at_param = at
        else:
            at_param = tuple(float(nodes[d][idx[d]]) for d in range(len(parameter_names)))
            detail = ", ".join(
                f"{n} = {v}" for n, v in zip(parameter_names, at_param)
            )
        raise SingularIntegrandError(
            f"integrand is not finite at quadrature node ({detail})", at_param
        )
    return flat


def _integrate_1d(integrand: ScalarExpr, parameter: str, period: float,
                  rule: str, panels: int) -> float:
    t, w = _nodes_weights(rule, panels, period)
    vals = integrand.evaluate({parameter: t})
    vals = np.broadcast_to(np.asarray(vals, dtype=float), t.shape)
    _check_finite(vals, (t,), (parameter,))
    return float(np.dot(w, vals))


def _richardson(raw, order: int):
    """Extrapolate a sequence of rule values where panels double each step."""
    table = [list(raw)]
    k = order
    while len(table[-1]) > 1:
        prev = table[-1]
        factor = 2.0 ** k
        table.append(
            [(factor * prev[i + 1] - prev[i]) / (factor - 1.0) for i in range(len(prev) - 1)]
        )
        k += 2
    return table


def _refined(values_by_panels, rule, tol):
    raw = [v for _, v in values_by_panels]
    if len(raw) == 1:
        return IntegralResult(raw[0], None, tuple(values_by_panels))
    order = 4 if rule == "simpson" else 2
    table = _richardson(raw, order)
    best = table[-1][0]
    prev = table[-2][-1] if len(table) >= 2 else raw[-1]
    err = max(abs(best - prev), tol)
    return IntegralResult(best, err, tuple(values_by_panels))


# -- circulation -------------------------------------------------------------------


def pullback_integrand(A: DifferentialForm, c: ClosedCurve) -> ScalarExpr:
    """Pull the 1-form back to the curve parameter: sum_i a_i(c(t)) c_i'(t)."""
    if A.degree != 1:
        raise DegreeError("circulation integrates a 1-form")
    if len(A.variables) != c.dimension:
        raise ContextMismatchError(
            f"form has {len(A.variables)} variables, curve has {c.dimension} components"
        )
    sub = {name: comp for name, comp in zip(A.variables, c.components)}
    vel = c.velocity()
    acc = ex.ZERO
    for (i,), coeff in sorted(A.coeffs.items()):
        acc = ex.add(acc, ex.mul(coeff.substitute(sub), vel[i]))
    return acc.simplify()


def circulate(A: DifferentialForm, c: ClosedCurve, q: QuadratureSpec) -> IntegralResult:
    """Period integral of A around the closed curve.

    The pullback integrand is sampled at the quadrature nodes; a
    non-finite value raises a singularity error carrying the offending
    parameter value.  Richardson levels double the panel count and
    extrapolate.
    """
    integrand = pullback_integrand(A, c)
    values = []
    panels = q.panels
    for _ in range(q.refinements + 1):
        values.append((panels, _integrate_1d(integrand, c.parameter, c.period, q.rule, panels)))
        panels *= 2
    return _refined(values, q.rule, q.tol)


def clebsch_one_form(phi: ScalarExpr, psi: ScalarExpr, sig: SignatureSpec, variables) -> DifferentialForm:
    """(phi d(psi) - psi d(phi)) / (s a phi^p + s b psi^p)^(2/p), the closed
    two-function period form."""
    lam = sig.lam((phi, psi), 2)
    comps = []
    for name in variables:
        num = ex.sub(ex.mul(phi, psi.diff(name)), ex.mul(psi, phi.diff(name)))
        comps.append(ex.div(num, lam).simplify())
    return DifferentialForm.one_form(tuple(variables), comps)


def clebsch_circulation(phi, psi, sig: SignatureSpec, c: ClosedCurve, q: QuadratureSpec,
                        variables=None) -> IntegralResult:
    """Circulation of the two-function form along the curve."""
    if variables is None:
        names = sorted(phi.variables() | psi.variables())
        if len(names) < c.dimension:
            raise ContextMismatchError(
                "pass `variables` explicitly when the pair does not mention them all"
            )
        variables = names
    A = clebsch_one_form(ex._wrap(phi), ex._wrap(psi), sig, variables)
    return circulate(A, c, q)


# -- Gauss linking ------------------------------------------------------------------


def _curve_points(c: ClosedCurve, t: np.ndarray) -> np.ndarray:
    env = {c.parameter: t}
    return np.stack(
        [np.broadcast_to(np.asarray(comp.evaluate(env), dtype=float), t.shape)
         for comp in c.components]
    )


def _min_separation(c1: ClosedCurve, c2: ClosedCurve, t1: np.ndarray, t2: np.ndarray) -> float:
    p1 = _curve_points(c1, t1)   # (3, n1)
    p2 = _curve_points(c2, t2)
    diff = p1[:, :, None] - p2[:, None, :]
    return float(np.sqrt((diff * diff).sum(axis=0)).min())


def gauss_linking(c1: ClosedCurve, c2: ClosedCurve, sig: SignatureSpec,
                  q: QuadratureSpec) -> IntegralResult:
    """Normalized Gauss double integral

        (1/4pi) oint oint (z . V1 x V2) / lambda(z) dt dt',  z = R2 - R1,

    which takes the signed integer linking value for the elliptic
    signature, lambda = (z.z)^(3/2).  Curves must stay separated; a node
    grid precheck rejects pairs closer than 1e-6.
    """
    if c1.dimension != 3 or c2.dimension != 3:
        raise ContextMismatchError("linking requires two curves in 3 ambient variables")
    c1 = c1.rename_parameter("t@1")
    c2 = c2.rename_parameter("t@2")

    t, _ = _nodes_weights(q.rule, q.panels, c1.period)
    s, _ = _nodes_weights(q.rule, q.panels, c2.period)
    sep = _min_separation(c1, c2, t, s)
    if sep <= MIN_CURVE_SEPARATION:
        raise CurveProximityError(
            f"curves approach within {sep:g}; linking integrand is singular", sep
        )

    z = tuple(ex.sub(b, a) for a, b in zip(c1.components, c2.components))
    v1 = c1.velocity()
    v2 = c2.velocity()
    tri = _triple_product(z, v1, v2)
    lam = sig.lam(z, 3)
    integrand = ex.div(tri, lam)

    values = []
    panels = q.panels
    for _ in range(q.refinements + 1):
        values.append((panels, _integrate_2d(integrand, c1, c2, q.rule, panels)))
        panels *= 2
    res = _refined(values, q.rule, q.tol)
    scale = 1.0 / (4.0 * math.pi)
    return IntegralResult(
        res.value * scale,
        None if res.error_estimate is None else res.error_estimate * scale,
        tuple((p, v * scale) for p, v in res.convergence),
    )


def _triple_product(a, b, c):
    from .physics import cross, dot

    return dot(a, cross(b, c))


def _integrate_2d(integrand: ScalarExpr, c1: ClosedCurve, c2: ClosedCurve,
                  rule: str, panels: int) -> float:
    t, wt = _nodes_weights(rule, panels, c1.period)
    s, ws = _nodes_weights(rule, panels, c2.period)
    grid_t, grid_s = np.meshgrid(t, s, indexing="ij")
    vals = integrand.evaluate({c1.parameter: grid_t, c2.parameter: grid_s})
    vals = np.broadcast_to(np.asarray(vals, dtype=float), grid_t.shape)
    _check_finite(vals, (grid_t, grid_s), (c1.parameter, c2.parameter))
    return float(wt @ vals @ ws)


# -- braid integral ------------------------------------------------------------------


def braid_integral(p1: ClosedCurve, p2: ClosedCurve, p3: ClosedCurve,
                   E_over_c: float, sig: SignatureSpec, q: QuadratureSpec) -> IntegralResult:
    """Triple period integral over three independently parameterized loops:

        oint^3 (E/c) f1 . (f2 x f3) dt dt' dt'' / (s1 P.P + s2 (E/c)^2)^2

    with P the pointwise sum of the three momentum curves and f_i their
    parameter derivatives.  The three parameters are kept distinct; a
    synchronized (functionally related) pair collapses the chain to two
    dimensions and the integral vanishes identically.
    """
    for c in (p1, p2, p3):
        if c.dimension != 3:
            raise ContextMismatchError("braid requires momentum curves in 3 components")
    p1 = p1.rename_parameter("t@1")
    p2 = p2.rename_parameter("t@2")
    p3 = p3.rename_parameter("t@3")

    P = tuple(
        ex.add(ex.add(a, b), c)
        for a, b, c in zip(p1.components, p2.components, p3.components)
    )
    from .physics import dot

    s1 = float(sig.signs[0]) if len(sig.signs) > 0 else 1.0
    s2 = float(sig.signs[1]) if len(sig.signs) > 1 else 1.0
    lam = ex.power(
        ex.add(ex.mul(ex.const(s1), dot(P, P)), ex.const(s2 * E_over_c * E_over_c)),
        2.0,
    )
    tri = _triple_product(p1.velocity(), p2.velocity(), p3.velocity())
    integrand = ex.div(ex.mul(ex.const(E_over_c), tri), lam)

    values = []
    panels = q.panels
    for _ in range(q.refinements + 1):
        values.append((panels, _integrate_3d(integrand, (p1, p2, p3), lam, q.rule, panels)))
        panels *= 2
    return _refined(values, q.rule, q.tol)


def _integrate_3d(integrand, curves, lam, rule, panels) -> float:
    axes = [_nodes_weights(rule, panels, c.period) for c in curves]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    env = {c.parameter: g for c, g in zip(curves, grids)}
    den = np.broadcast_to(np.asarray(lam.evaluate(env), dtype=float), grids[0].shape)
    if (np.abs(den) < 1e-9).any():
        raise SingularIntegrandError("braid denominator vanishes on the node grid")
    vals = np.broadcast_to(np.asarray(integrand.evaluate(env), dtype=float), grids[0].shape)
    _check_finite(vals, grids, tuple(c.parameter for c in curves))
    w1, w2, w3 = (a[1] for a in axes)
    return float(np.einsum("i,j,k,ijk->", w1, w2, w3, vals))


# -- Holder-norm currents --------------------------------------------------------------


def holder_current(V: VectorField, sig: SignatureSpec) -> DifferentialForm:
    """The (n-1)-form i(V)(dV^1 ^ ... ^ dV^n) / lambda on the base space.

    lambda is the signed p-norm power of the components with volume
    exponent n/p; the result has vanishing exterior derivative away from
    the null set of lambda, for every p and signature.
    """
    n = len(V.variables)
    lam = sig.lam(V.components, n).simplify()
    if lam.is_const(0.0):
        raise InputError("the Holder denominator is identically zero")
    differentials = [
        DifferentialForm.one_form(V.variables, [comp.diff(u) for u in V.variables])
        for comp in V.components
    ]
    result = DifferentialForm.zero(V.variables, n - 1)
    for k in range(n):
        term = None
        for i in range(n):
            if i == k:
                continue
            term = differentials[i] if term is None else wedge(term, differentials[i])
        coeff = ex.div(V.components[k], lam)
        if k % 2 == 1:
            coeff = ex.neg(coeff)
        result = result + term.scale(coeff)
    return result.simplify()


def jacobian(V: VectorField):
    return [
        [V.components[i].diff(u) for u in V.variables]
        for i in range(len(V.variables))
    ]


def _det(m) -> ScalarExpr:
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = ex.ZERO
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = ex.mul(m[0][j], _det(minor))
        acc = ex.add(acc, ex.neg(term) if j % 2 else term)
    return acc


def cofactor_adjoint_current(V: VectorField, sig: SignatureSpec) -> VectorField:
    """adj(J_V) . V / lambda: the divergence-free dual vector field.

    The flux (n-1)-form of the result carries the same coefficients as
    holder_current, so its divergence vanishes away from lambda = 0.
    """
    n = len(V.variables)
    J = jacobian(V)
    lam = sig.lam(V.components, n).simplify()
    if lam.is_const(0.0):
        raise InputError("the Holder denominator is identically zero")
    out = []
    for j in range(n):
        acc = ex.ZERO
        for k in range(n):
            minor = [
                [J[r][c] for c in range(n) if c != j]
                for r in range(n) if r != k
            ]
            cof = _det(minor) if minor else ex.ONE
            if (k + j) % 2:
                cof = ex.neg(cof)
            acc = ex.add(acc, ex.mul(cof, V.components[k]))
        out.append(ex.div(acc, lam).simplify())
    return VectorField(V.variables, tuple(out))


def flux_form(W: VectorField) -> DifferentialForm:
    """sum_k (-1)^(k-1) W_k dx^1 ^ ... omit k ... ^ dx^n; its d is (div W) vol."""
    n = len(W.variables)
    coeffs = {}
    for k in range(n):
        key = tuple(i for i in range(n) if i != k)
        c = W.components[k] if k % 2 == 0 else ex.neg(W.components[k])
        c = c.simplify()
        if not c.is_const(0.0):
            coeffs[key] = c
    return DifferentialForm(W.variables, n - 1, coeffs)


def current_divergence(W: VectorField) -> ScalarExpr:
    """Divergence read off d(flux_form), not assembled termwise."""
    n = len(W.variables)
    d = ext_d(flux_form(W))
    return d.coefficient(tuple(range(n))).simplify()
