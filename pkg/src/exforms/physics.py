"""Physics fixtures over a 4-variable context (x, y, z, t).

Electromagnetic fields from potentials, the frozen-in classification of
flows, Euler / Helmholtz / Navier-Stokes residual operators, and parity
and helicity diagnostics.  Everything is symbolic: each residual is an
expression triple that vanishes exactly when the corresponding equation
holds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import expressions as ex
from .errors import ContextMismatchError, DegreeError, InputError
from .expressions import SampleBox, ScalarExpr, TolerancePolicy, ZeroVerdict
from .forms import DifferentialForm, VectorField, ext_d, form_is_zero, interior, wedge

# -- vector calculus over expression triples ----------------------------------


def dot(u, v) -> ScalarExpr:
    return ex.add(ex.add(ex.mul(u[0], v[0]), ex.mul(u[1], v[1])), ex.mul(u[2], v[2]))


def cross(u, v):
    return (
        ex.sub(ex.mul(u[1], v[2]), ex.mul(u[2], v[1])),
        ex.sub(ex.mul(u[2], v[0]), ex.mul(u[0], v[2])),
        ex.sub(ex.mul(u[0], v[1]), ex.mul(u[1], v[0])),
    )


def grad(f: ScalarExpr, names):
    return tuple(f.diff(n) for n in names[:3])


def divergence(V, names) -> ScalarExpr:
    return ex.add(ex.add(V[0].diff(names[0]), V[1].diff(names[1])), V[2].diff(names[2]))


def curl(V, names):
    x, y, z = names[:3]
    return (
        ex.sub(V[2].diff(y), V[1].diff(z)),
        ex.sub(V[0].diff(z), V[2].diff(x)),
        ex.sub(V[1].diff(x), V[0].diff(y)),
    )


def vector_laplacian(V, names):
    """grad(div V) - curl(curl V), the coordinate vector Laplacian."""
    g = grad(divergence(V, names), names)
    cc = curl(curl(V, names), names)
    return tuple(ex.sub(g[i], cc[i]).simplify() for i in range(3))


def _scale3(s, u):
    return tuple(ex.mul(s, c) for c in u)


def _sub3(u, v):
    return tuple(ex.sub(a, b) for a, b in zip(u, v))


def _add3(u, v):
    return tuple(ex.add(a, b) for a, b in zip(u, v))


# -- electromagnetic potentials -------------------------------------------------


@dataclass(frozen=True)
class EMPotentials:
    """Vector potential triple and scalar potential over (x, y, z, t)."""

    a: tuple
    phi: ScalarExpr
    variables: tuple = ("x", "y", "z", "t")

    def __post_init__(self):
        if len(self.a) != 3 or len(self.variables) != 4:
            raise ContextMismatchError("potentials need 3 components over 4 variables")

    @classmethod
    def build(cls, a, phi, variables=("x", "y", "z", "t")):
        return cls(tuple(ex._wrap(c) for c in a), ex._wrap(phi), tuple(variables))


def em_field_components(a, phi, variables):
    """E = -da/dt - grad(phi), B = curl(a), all symbolic."""
    t = variables[3]
    E = tuple(
        ex.sub(ex.neg(a[i].diff(t)), phi.diff(variables[i])).simplify() for i in range(3)
    )
    B = tuple(c.simplify() for c in curl(a, variables))
    return E, B


def em_fields(p: EMPotentials):
    return em_field_components(p.a, p.phi, p.variables)


def potential_form(p: EMPotentials) -> DifferentialForm:
    """The action 1-form a.dr - phi dt."""
    return DifferentialForm.one_form(
        p.variables, (p.a[0], p.a[1], p.a[2], ex.neg(p.phi))
    )


def field_form(E, B, variables) -> DifferentialForm:
    """2-form of intensities:

    F = B_z dx^dy + B_x dy^dz + B_y dz^dx + E_x dx^dt + E_y dy^dt + E_z dz^dt
    """
    coeffs = {
        (0, 1): B[2],
        (1, 2): B[0],
        (0, 2): ex.neg(B[1]),
        (0, 3): E[0],
        (1, 3): E[1],
        (2, 3): E[2],
    }
    coeffs = {k: c.simplify() for k, c in coeffs.items()}
    return DifferentialForm(tuple(variables), 2, {k: c for k, c in coeffs.items() if not c.is_const(0.0)})


def faraday_residual_from_fields(E, B, variables):
    """(curl E + dB/dt, div B); both vanish when (E, B) derive from potentials."""
    t = variables[3]
    r = curl(E, variables)
    r = tuple(ex.add(r[i], B[i].diff(t)).simplify() for i in range(3))
    return r, divergence(B, variables).simplify()


def maxwell_faraday_residual(p: EMPotentials):
    E, B = em_fields(p)
    return faraday_residual_from_fields(E, B, p.variables)


def excitation_form(D, H, variables=("x", "y", "z", "t")) -> DifferentialForm:
    """2-form of excitations whose exterior derivative carries charge and current:

    G = -D_x dy^dz - D_y dz^dx - D_z dx^dy + H_x dx^dt + H_y dy^dt + H_z dz^dt

    so that dG reads back as (curl H - dD/dt, div D).
    """
    variables = tuple(variables)
    D = tuple(ex._wrap(c) for c in D)
    H = tuple(ex._wrap(c) for c in H)
    coeffs = {
        (1, 2): ex.neg(D[0]),
        (0, 2): D[1],          # -D_y dz^dx = +D_y dx^dz
        (0, 1): ex.neg(D[2]),
        (0, 3): H[0],
        (1, 3): H[1],
        (2, 3): H[2],
    }
    coeffs = {k: c.simplify() for k, c in coeffs.items()}
    return DifferentialForm(variables, 2, {k: c for k, c in coeffs.items() if not c.is_const(0.0)})


def current_components(J: DifferentialForm):
    """Read a 3-form as a current [j, rho]:

    J = j_x dy^dz^dt - j_y dx^dz^dt + j_z dx^dy^dt - rho dx^dy^dz
    """
    if J.degree != 3 or len(J.variables) != 4:
        raise DegreeError("current extraction requires a 3-form in 4 variables")
    j = (
        J.coefficient((1, 2, 3)),
        ex.neg(J.coefficient((0, 2, 3))).simplify(),
        J.coefficient((0, 1, 3)),
    )
    rho = ex.neg(J.coefficient((0, 1, 2))).simplify()
    return j, rho


def charge_current(G: DifferentialForm):
    """J = dG with its (current vector, charge density) reading."""
    if G.degree != 2 or len(G.variables) != 4:
        raise DegreeError("excitation form must be a 2-form in 4 variables")
    J = ext_d(G).simplify()
    j, rho = current_components(J)
    return J, j, rho


def continuity_anomaly(rho: ScalarExpr, V, variables=("x", "y", "z", "t")) -> ScalarExpr:
    """div(rho V) + d(rho)/dt, read off the exterior derivative of the
    transport 3-form rho (V_x dy^dz^dt - V_y dx^dz^dt + V_z dx^dy^dt - dx^dy^dz)."""
    variables = tuple(variables)
    rho = ex._wrap(rho)
    V = tuple(ex._wrap(c) for c in V)
    coeffs = {
        (1, 2, 3): ex.mul(rho, V[0]),
        (0, 2, 3): ex.neg(ex.mul(rho, V[1])),
        (0, 1, 3): ex.mul(rho, V[2]),
        (0, 1, 2): ex.neg(rho),
    }
    C = DifferentialForm(variables, 3, coeffs)
    return ext_d(C).coefficient((0, 1, 2, 3)).simplify()


# -- frozen-in classification -----------------------------------------------------


class ProcessClass(enum.Enum):
    EXTREMAL = "extremal"
    BERNOULLI_CASIMIR = "bernoulli-casimir"
    SYMPLECTIC_CLOSED = "symplectic-closed"
    NON_UNIFORM = "non-uniform"


def classify_process(
    V4: VectorField,
    A: DifferentialForm,
    box: SampleBox,
    pol: TolerancePolicy,
    theta: ScalarExpr = None,
) -> ProcessClass:
    """Classify a flow against the 1-form A by the transversal part W = i(V)dA.

    W identically zero is extremal.  A caller-supplied theta with
    d(theta) = W (verified by sampling) is Bernoulli-Casimir.  Otherwise a
    closed W is symplectic; exactness beyond closedness is not decided
    here.  Anything else fails uniform continuity.
    """
    if A.degree != 1:
        raise DegreeError("classification needs a 1-form")
    W = interior(V4, ext_d(A)).simplify()
    if form_is_zero(W, box, pol).identically_zero:
        return ProcessClass.EXTREMAL
    if theta is not None:
        dtheta = ext_d(DifferentialForm.function(A.variables, theta))
        if form_is_zero(W - dtheta, box, pol).identically_zero:
            return ProcessClass.BERNOULLI_CASIMIR
    dW = ext_d(W).simplify()
    if form_is_zero(dW, box, pol).identically_zero:
        return ProcessClass.SYMPLECTIC_CLOSED
    return ProcessClass.NON_UNIFORM


def master_residuals(p: EMPotentials, V):
    """Frozen-in field residuals for a velocity triple V:

        r1 = curl(E + V x B)
        r2 = d(E + V x B)/dt + grad(E . V)

    r1 = 0 together with the Faraday identity is the induction or
    transport law curl(V x B) = dB/dt; r2 = 0 extends limit-point
    invariance to the mixed components, even with E . V nonzero.
    """
    V = tuple(ex._wrap(c) for c in V)
    E, B = em_fields(p)
    w = _add3(E, cross(V, B))
    r1 = tuple(c.simplify() for c in curl(w, p.variables))
    t = p.variables[3]
    g = grad(dot(E, V), p.variables)
    r2 = tuple(ex.add(w[i].diff(t), g[i]).simplify() for i in range(3))
    return r1, r2


# -- hydrodynamics -----------------------------------------------------------------


@dataclass(frozen=True)
class FluidState:
    """Velocity triple, Bernoulli function (d(psi) = dP/rho), viscosity."""

    v: tuple
    psi: ScalarExpr
    nu: float = 0.0
    variables: tuple = ("x", "y", "z", "t")

    def __post_init__(self):
        if self.nu < 0:
            raise InputError("viscosity must be >= 0")
        if len(self.v) != 3 or len(self.variables) != 4:
            raise ContextMismatchError("fluid state needs 3 components over 4 variables")

    @classmethod
    def build(cls, v, psi, nu=0.0, variables=("x", "y", "z", "t")):
        return cls(tuple(ex._wrap(c) for c in v), ex._wrap(psi), float(nu), tuple(variables))

    @property
    def vorticity(self):
        return tuple(c.simplify() for c in curl(self.v, self.variables))

    @property
    def bernoulli_head(self) -> ScalarExpr:
        """v.v/2 + psi, the scalar potential of the action 1-form."""
        half = ex.mul(ex.const(0.5), dot(self.v, self.v))
        return ex.add(half, self.psi).simplify()


def euler_action(f: FluidState) -> DifferentialForm:
    """A = v.dr - (v.v/2 + psi) dt."""
    head = f.bernoulli_head
    return DifferentialForm.one_form(f.variables, (f.v[0], f.v[1], f.v[2], ex.neg(head)))


def flow_vector(f: FluidState) -> VectorField:
    """(v, 1): the flow with unit time component."""
    return VectorField.build(f.variables, (f.v[0], f.v[1], f.v[2], ex.ONE))


def euler_residual(f: FluidState):
    """Spatial components of i(V)dA for the action above; identically zero
    exactly when dv/dt + grad(v.v/2) - v x curl(v) = -grad(psi)."""
    W = interior(flow_vector(f), ext_d(euler_action(f))).simplify()
    return tuple(W.coefficient((i,)) for i in range(3))


def helmholtz_residual(f: FluidState):
    """curl(v x w) - dw/dt with w = curl v; zero means vorticity transport."""
    w = f.vorticity
    r = curl(cross(f.v, w), f.variables)
    t = f.variables[3]
    return tuple(ex.sub(r[i], w[i].diff(t)).simplify() for i in range(3))


def ns_residual(f: FluidState):
    """Residual of dv/dt + grad(v.v/2) - v x w = nu lap(v) - grad(psi),
    with the vector Laplacian expanded as grad(div v) - curl(curl v)."""
    w = f.vorticity
    lap = vector_laplacian(f.v, f.variables)
    t = f.variables[3]
    head_grad = grad(ex.mul(ex.const(0.5), dot(f.v, f.v)), f.variables)
    vxw = cross(f.v, w)
    psi_grad = grad(f.psi, f.variables)
    out = []
    for i in range(3):
        r = ex.add(f.v[i].diff(t), head_grad[i])
        r = ex.sub(r, vxw[i])
        r = ex.sub(r, ex.mul(ex.const(f.nu), lap[i]))
        r = ex.add(r, psi_grad[i])
        out.append(r.simplify())
    return tuple(out)


def ns_parity(f: FluidState) -> ScalarExpr:
    """Parity coefficient -2 nu (w . curl w), w = curl v.

    Vanishes when the viscosity is zero or the vorticity field satisfies
    the surface-integrability condition.
    """
    w = f.vorticity
    cw = curl(w, f.variables)
    return ex.mul(ex.const(-2.0 * f.nu), dot(w, cw)).simplify()


def ns_fluctuation_action(f: FluidState) -> DifferentialForm:
    """Action whose flow satisfies i(V)dA = g_k (dx^k - v^k dt) on the
    initial slice, with g = nu curl(curl v):

        A = (v + t g_corr).dr - (v.v/2 + psi) dt
        g_corr = nu curl(curl v) + v x w - grad(v.v/2 + psi) - dv/dt

    On the t = 0 slice this makes the flow an exact viscous-force
    fluctuation system; the parity 4-form coefficient there equals
    ns_parity.
    """
    w = f.vorticity
    cc = curl(w, f.variables)
    head = f.bernoulli_head
    t_name = f.variables[3]
    g = _add3(_scale3(ex.const(f.nu), cc), cross(f.v, w))
    g = _sub3(g, grad(head, f.variables))
    g = _sub3(g, tuple(f.v[i].diff(t_name) for i in range(3)))
    t = ex.var(t_name)
    a = tuple(ex.add(f.v[i], ex.mul(t, g[i])).simplify() for i in range(3))
    return DifferentialForm.one_form(f.variables, (a[0], a[1], a[2], ex.neg(head)))


def parity_form(A: DifferentialForm) -> DifferentialForm:
    """dA ^ dA, the 4-form whose single coefficient is the parity density."""
    F = ext_d(A)
    return wedge(F, F).simplify()


@dataclass(frozen=True)
class HelicityDiagnostics:
    h: ScalarExpr                   # v . curl v
    T: tuple                        # (v.w) v - (v.v/2 + psi) w
    conservation_residual: ScalarExpr
    dH_zero: ZeroVerdict


def helicity_diagnostics(f: FluidState, box: SampleBox, pol: TolerancePolicy) -> HelicityDiagnostics:
    """Helicity density, torsion current of the fluid action, its pointwise
    conservation residual div T + dh/dt, and whether d(A^dA) vanishes.

    T = (v.w) v - (v.v/2 - psi) w.  The sign on psi is fixed by expanding
    A^dA for the action v.dr - (v.v/2 + psi) dt directly: flows that
    satisfy the momentum balance make the two agree exactly (the rigid
    rotation with psi = (x^2+y^2)/2 has A^dA identically zero, which pins
    the sign).

    The closedness verdict uses the inviscid action when nu = 0 and the
    viscous fluctuation action otherwise.
    """
    w = f.vorticity
    h = dot(f.v, w).simplify()
    half = ex.mul(ex.const(0.5), dot(f.v, f.v))
    weight = ex.sub(half, f.psi).simplify()
    T = tuple(
        ex.sub(ex.mul(h, f.v[i]), ex.mul(weight, w[i])).simplify() for i in range(3)
    )
    t = f.variables[3]
    residual = ex.add(divergence(T, f.variables), h.diff(t)).simplify()
    action = euler_action(f) if f.nu == 0 else ns_fluctuation_action(f)
    verdict = form_is_zero(parity_form(action), box, pol)
    return HelicityDiagnostics(h, T, residual, verdict)
