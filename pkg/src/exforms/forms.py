"""Differential p-forms over a shared ordered variable list.

Coefficients are sparse: a map from strictly increasing index tuples into
scalar expression trees, with absent keys meaning zero.  All operators are
metric-free: wedge, exterior derivative, interior product, Lie derivative
(by the magic formula i(V)d + d i(V)), and pullback along a smooth map.

The exterior derivative of a top-degree form cannot raise the degree, so
it returns the canonical zero form flagged ``top_exceeded``; every
operator here treats that sentinel as plain zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import expressions as ex
from .errors import ContextMismatchError, DegreeError
from .expressions import SampleBox, ScalarExpr, TolerancePolicy, ZeroVerdict


def _merge_sign(left: tuple, right: tuple):
    """Sort the concatenated index tuple, returning (key, parity sign).

    A repeated index collapses the term: returns (None, 0).
    """
    idx = list(left) + list(right)
    sign = 1
    # insertion sort with inversion counting; tuples are tiny
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, 0
    return tuple(idx), sign


@dataclass(frozen=True)
class DifferentialForm:
    variables: tuple
    degree: int
    coeffs: dict = field(default_factory=dict)
    top_exceeded: bool = False

    def __post_init__(self):
        n = len(self.variables)
        if not 0 <= self.degree <= n:
            raise DegreeError(f"degree {self.degree} not representable in {n} variables")
        for key in self.coeffs:
            if len(key) != self.degree:
                raise DegreeError(f"key {key} does not match degree {self.degree}")
            if any(not 0 <= i < n for i in key):
                raise DegreeError(f"key {key} out of range for {n} variables")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise DegreeError(f"key {key} is not strictly increasing")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, variables, degree: int, top_exceeded=False):
        return cls(tuple(variables), degree, {}, top_exceeded)

    @classmethod
    def function(cls, variables, f: ScalarExpr):
        """Degree-0 form holding a single scalar field."""
        return cls(tuple(variables), 0, {(): f})

    @classmethod
    def one_form(cls, variables, components):
        """Build sum_i components[i] dx^i, dropping structural zeros."""
        variables = tuple(variables)
        comps = [ex._wrap(c) for c in components]
        if len(comps) != len(variables):
            raise ContextMismatchError("one component per variable required")
        coeffs = {(i,): c for i, c in enumerate(comps) if not c.is_const(0.0)}
        return cls(variables, 1, coeffs)

    @classmethod
    def basis(cls, variables, *names):
        """The wedge of coordinate differentials, e.g. basis(v, 'x', 'y')."""
        variables = tuple(variables)
        idx = tuple(variables.index(n) for n in names)
        key, sign = _merge_sign(idx, ())
        if sign == 0:
            return cls.zero(variables, len(names))
        c = ex.ONE if sign > 0 else ex.const(-1.0)
        return cls(variables, len(names), {key: c})

    # -- basic algebra ---------------------------------------------------------

    def coefficient(self, key: tuple) -> ScalarExpr:
        return self.coeffs.get(tuple(key), ex.ZERO)

    def map_coeffs(self, fn) -> "DifferentialForm":
        out = {}
        for k, c in self.coeffs.items():
            nc = fn(c)
            if not nc.is_const(0.0):
                out[k] = nc
        return DifferentialForm(self.variables, self.degree, out, self.top_exceeded)

    def simplify(self) -> "DifferentialForm":
        return self.map_coeffs(lambda c: c.simplify())

    def scale(self, s) -> "DifferentialForm":
        s = ex._wrap(s)
        return self.map_coeffs(lambda c: ex.mul(s, c))

    def __neg__(self):
        return self.map_coeffs(ex.neg)

    def __add__(self, other):
        self._check_same(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc = ex.add(out.get(k, ex.ZERO), c)
            if acc.is_const(0.0):
                out.pop(k, None)
            else:
                out[k] = acc
        return DifferentialForm(self.variables, self.degree, out,
                                self.top_exceeded and other.top_exceeded)

    def __sub__(self, other):
        return self + (-other)

    def _check_same(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError("expected a DifferentialForm")
        if self.variables != other.variables:
            raise ContextMismatchError(
                f"contexts differ: {self.variables} vs {other.variables}"
            )
        if self.degree != other.degree:
            raise DegreeError(f"degrees differ: {self.degree} vs {other.degree}")

    def __str__(self):
        return format_form(self)


@dataclass(frozen=True)
class VectorField:
    variables: tuple
    components: tuple

    def __post_init__(self):
        if len(self.components) != len(self.variables):
            raise ContextMismatchError("one component per variable required")

    @classmethod
    def build(cls, variables, components):
        return cls(tuple(variables), tuple(ex._wrap(c) for c in components))

    def component(self, i: int) -> ScalarExpr:
        return self.components[i]


@dataclass(frozen=True)
class SmoothMap:
    """Map between variable lists given by target components over the source."""

    source: tuple
    target: tuple
    components: tuple

    def __post_init__(self):
        if len(self.components) != len(self.target):
            raise ContextMismatchError("one component per target variable required")

    @classmethod
    def build(cls, source, target, components):
        return cls(tuple(source), tuple(target), tuple(ex._wrap(c) for c in components))


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Exterior product; degree adds, repeated indices drop, parity signs."""
    if a.variables != b.variables:
        raise ContextMismatchError("wedge requires a shared context")
    n = len(a.variables)
    deg = a.degree + b.degree
    if deg > n:
        return DifferentialForm.zero(a.variables, n, top_exceeded=True)
    out = {}
    for ka, ca in a.coeffs.items():
        for kb, cb in b.coeffs.items():
            key, sign = _merge_sign(ka, kb)
            if sign == 0:
                continue
            term = ex.mul(ca, cb)
            if sign < 0:
                term = ex.neg(term)
            acc = ex.add(out.get(key, ex.ZERO), term)
            if acc.is_const(0.0):
                out.pop(key, None)
            else:
                out[key] = acc
    return DifferentialForm(a.variables, deg, out)


def ext_d(a: DifferentialForm) -> DifferentialForm:
    """Exterior derivative: d(f dx^I) = sum_v df/dx^v dx^v ^ dx^I."""
    n = len(a.variables)
    if a.degree >= n:
        return DifferentialForm.zero(a.variables, n, top_exceeded=True)
    out = {}
    for key, c in a.coeffs.items():
        for v, name in enumerate(a.variables):
            dc = c.diff(name)
            if dc.is_const(0.0):
                continue
            nk, sign = _merge_sign((v,), key)
            if sign == 0:
                continue
            term = dc if sign > 0 else ex.neg(dc)
            acc = ex.add(out.get(nk, ex.ZERO), term)
            if acc.is_const(0.0):
                out.pop(nk, None)
            else:
                out[nk] = acc
    return DifferentialForm(a.variables, a.degree + 1, out)


def interior(V: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Contraction into the first slot:

    i(V)(dx^{i1}^...^dx^{ip}) = sum_k (-1)^(k-1) V^{ik} dx^{i1}^...omit k...^dx^{ip}
    """
    if V.variables != a.variables:
        raise ContextMismatchError("interior product requires a shared context")
    if a.degree == 0:
        raise DegreeError("interior product of a 0-form is undefined")
    out = {}
    for key, c in a.coeffs.items():
        for k, idx in enumerate(key):
            comp = V.components[idx]
            if comp.is_const(0.0):
                continue
            term = ex.mul(comp, c)
            if k % 2 == 1:
                term = ex.neg(term)
            nk = key[:k] + key[k + 1 :]
            acc = ex.add(out.get(nk, ex.ZERO), term)
            if acc.is_const(0.0):
                out.pop(nk, None)
            else:
                out[nk] = acc
    return DifferentialForm(a.variables, a.degree - 1, out)


def lie(V: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Lie derivative by the magic formula L_V = i(V) d + d i(V).

    On 0-forms this is the convective derivative V . grad.
    """
    if V.variables != a.variables:
        raise ContextMismatchError("Lie derivative requires a shared context")
    da = ext_d(a)
    if da.top_exceeded:
        first = DifferentialForm.zero(a.variables, a.degree)
    else:
        first = interior(V, da)
    if a.degree == 0:
        return first
    return first + ext_d(interior(V, a))


def pullback(m: SmoothMap, a: DifferentialForm) -> DifferentialForm:
    """Functional substitution into coefficients plus dx^i -> d(m^i)."""
    if m.target != a.variables:
        raise ContextMismatchError(
            f"form lives over {a.variables}, map targets {m.target}"
        )
    subst = {name: comp for name, comp in zip(m.target, m.components)}
    n_src = len(m.source)
    if a.degree > n_src:
        return DifferentialForm.zero(m.source, n_src, top_exceeded=True)
    if a.degree == 0:
        f = a.coefficient(()).substitute(subst).simplify()
        return DifferentialForm.function(m.source, f)
    differentials = [
        DifferentialForm.one_form(
            m.source, [comp.diff(u) for u in m.source]
        )
        for comp in m.components
    ]
    result = DifferentialForm.zero(m.source, a.degree)
    for key, c in a.coeffs.items():
        term = differentials[key[0]]
        for idx in key[1:]:
            term = wedge(term, differentials[idx])
        result = result + term.scale(c.substitute(subst))
    return result.simplify()


def form_is_zero(a: DifferentialForm, box: SampleBox, pol: TolerancePolicy) -> ZeroVerdict:
    """Zero iff every coefficient passes the sampled scalar zero test."""
    used = 0
    skipped = 0
    for key in sorted(a.coeffs):
        v = ex.is_zero(a.coeffs[key], box, pol)
        if not v.identically_zero:
            return ZeroVerdict(False, v.witness_point, v.witness_value, key,
                               v.samples_used, v.samples_skipped)
        used = max(used, v.samples_used)
        skipped = max(skipped, v.samples_skipped)
    return ZeroVerdict(True, None, None, None, used, skipped)


def format_form(a: DifferentialForm) -> str:
    """Stable text rendering in sorted basis order with explicit wedges."""
    if a.degree == 0:
        return ex.format_expr(a.coefficient(()))
    parts = []
    for key in sorted(a.coeffs):
        basis = "^".join("d" + a.variables[i] for i in key)
        parts.append(f"({ex.format_expr(a.coeffs[key])}) {basis}")
    if not parts:
        return "0"
    return " + ".join(parts)
