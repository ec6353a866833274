"""Pfaff sequence, Pfaff dimension, torsion current, and the finite
point-set topology generated by the supports of the sequence elements.

The sequence of a 1-form A is the ladder A, dA, A^dA, dA^dA, ... built by
alternating exterior derivative and wedge with A, stopped at the first
semantically zero element or at top degree.  Treating the supports of the
leading four elements as abstract points A, F, H, K, the basis
{A, A|F, H, H|K} generates a finite topology in which the exterior
derivative acts as the limit-point operator and whose connectedness is
governed by the torsion element H.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import chain, combinations

from . import expressions as ex
from .errors import DegreeError, InputError
from .expressions import SampleBox, ScalarExpr, TolerancePolicy
from .forms import DifferentialForm, ext_d, form_is_zero, wedge

LABELS = ("A", "F", "H", "K")


def _label(i: int) -> str:
    return LABELS[i] if i < 4 else f"L{i + 1}"


@dataclass(frozen=True)
class PfaffElement:
    label: str
    form: DifferentialForm
    nonvanishing: bool
    witness: dict = None          # point where the element was caught nonzero
    witness_component: tuple = None
    witness_value: float = None


@dataclass(frozen=True)
class PfaffSequence:
    elements: tuple
    box: SampleBox

    @property
    def labels(self):
        return tuple(e.label for e in self.elements)

    def element(self, label: str) -> PfaffElement:
        for e in self.elements:
            if e.label == label:
                return e
        raise KeyError(label)

    @property
    def dimension(self) -> int:
        """Region Pfaff dimension: degree of the last nonvanishing element."""
        dim = 0
        for e in self.elements:
            if e.nonvanishing:
                dim = e.form.degree
        return dim

    @property
    def torsion_vanishes(self) -> bool:
        for e in self.elements:
            if e.label == "H":
                return not e.nonvanishing
        return True


def pfaff_sequence(A: DifferentialForm, box: SampleBox, pol: TolerancePolicy) -> PfaffSequence:
    """Build the alternating d / wedge-with-A ladder with nonvanishing flags.

    Stops after the first identically-zero element (which is kept, flagged
    vanishing) or once top degree is reached.  Inconclusive zero tests
    propagate as errors.
    """
    if A.degree != 1:
        raise DegreeError("the Pfaff sequence starts from a 1-form")
    n = len(A.variables)
    elements = []
    current = A
    i = 0
    while True:
        verdict = form_is_zero(current, box, pol)
        elements.append(
            PfaffElement(
                _label(i),
                current,
                not verdict.identically_zero,
                verdict.witness_point,
                verdict.witness_component,
                verdict.witness_value,
            )
        )
        if verdict.identically_zero or current.degree >= n:
            break
        i += 1
        # odd steps apply d, even steps wedge A back on
        if i % 2 == 1:
            current = ext_d(elements[-1].form)
        else:
            current = wedge(A, elements[-1].form)
        current = current.simplify()
    return PfaffSequence(tuple(elements), box)


def pointwise_dimensions(seq: PfaffSequence, box: SampleBox, pol: TolerancePolicy):
    """Pfaff dimension at each sample point; None where undefined.

    A point is undefined when it is excluded by the policy or when some
    coefficient fails to evaluate there.
    """
    out = []
    for p in box.points():
        if not pol.admits(p):
            out.append((p, None))
            continue
        dim = 0
        ok = True
        for e in seq.elements:
            nonzero = False
            try:
                for c in e.form.coeffs.values():
                    v, scale = c.evaluate_with_scale(p)
                    if abs(v) > pol.abs_tol + pol.rel_tol * scale:
                        nonzero = True
                        break
            except ex.EvaluationError:
                ok = False
                break
            if nonzero:
                dim = e.form.degree
        out.append((p, dim if ok else None))
    return out


# -- torsion current ------------------------------------------------------------


def _split_potentials(A: DifferentialForm):
    """Read A = a.dr - phi dt over a 4-variable context (last variable time-like)."""
    if len(A.variables) != 4 or A.degree != 1:
        raise DegreeError("torsion current requires a 1-form in 4 variables")
    a = tuple(A.coefficient((i,)) for i in range(3))
    phi = ex.neg(A.coefficient((3,))).simplify()
    return a, phi


def torsion_current(A: DifferentialForm):
    """Torsion current [T, h] = [E x a + phi B, a . B] of a 4D action 1-form.

    With the ordered basis (x, y, z, t), the components tile A^dA as

        A^dA = h dx^dy^dz - T_x dy^dz^dt + T_y dx^dz^dt - T_z dx^dy^dt,

    a correspondence fixed by direct expansion rather than by convention.
    """
    from .physics import cross, dot, em_field_components

    a, phi = _split_potentials(A)
    E, B = em_field_components(a, phi, A.variables)
    T = cross(E, a)
    T = tuple(ex.add(T[i], ex.mul(phi, B[i])).simplify() for i in range(3))
    h = dot(a, B).simplify()
    return T, h


def torsion_form_coefficients(T, h, variables):
    """Assemble the 3-form that the torsion current represents."""
    coeffs = {}
    entries = {
        (0, 1, 2): h,
        (1, 2, 3): ex.neg(T[0]),
        (0, 2, 3): T[1],
        (0, 1, 3): ex.neg(T[2]),
    }
    for k, c in entries.items():
        c = c.simplify()
        if not c.is_const(0.0):
            coeffs[k] = c
    return DifferentialForm(tuple(variables), 3, coeffs)


@dataclass(frozen=True)
class PfaffReport:
    """Everything the sequence analysis produces for one action 1-form."""

    sequence: PfaffSequence
    dimension: int
    pointwise: tuple                 # ((point, dimension | None), ...)
    torsion: tuple = None            # ((T_x, T_y, T_z), h) when N = 4
    parity: ScalarExpr = None        # single 4-form coefficient when N = 4
    connected: bool = True


def analyze_action(A: DifferentialForm, box: SampleBox, pol: TolerancePolicy) -> PfaffReport:
    """Sequence, dimension, pointwise dimensions, torsion/parity, connectedness."""
    seq = pfaff_sequence(A, box, pol)
    pointwise = tuple(pointwise_dimensions(seq, box, pol))
    torsion = None
    parity = None
    if len(A.variables) == 4:
        torsion = torsion_current(A)
        parity = ex.ZERO
        for e in seq.elements:
            if e.label == "K":
                parity = e.form.coefficient((0, 1, 2, 3))
    topo = build_cartan_topology(seq)
    return PfaffReport(seq, seq.dimension, pointwise, torsion, parity, topo.is_connected())


# -- finite topology -------------------------------------------------------------


def _powerset(items):
    items = tuple(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


@dataclass(frozen=True)
class FiniteTopology:
    """Finite carrier with opens generated from a basis by arbitrary union.

    ``d_map`` sends each carrier point to the set of points its exterior
    derivative supports; it is the candidate limit-point operator.
    """

    carrier: frozenset
    basis: tuple
    opens: frozenset
    d_map: dict

    @classmethod
    def from_basis(cls, carrier, basis, d_map):
        carrier = frozenset(carrier)
        if not carrier:
            raise InputError("empty carrier")
        basis = tuple(frozenset(b) & carrier for b in basis)
        opens = {frozenset(), carrier}
        for subset in _powerset([b for b in basis if b]):
            u = frozenset().union(*subset) if subset else frozenset()
            opens.add(u)
        d_map = {p: frozenset(d_map.get(p, ())) & carrier for p in carrier}
        return cls(carrier, basis, frozenset(opens), d_map)

    def is_open(self, s) -> bool:
        return frozenset(s) in self.opens

    def is_closed(self, s) -> bool:
        return (self.carrier - frozenset(s)) in self.opens

    @property
    def closeds(self) -> frozenset:
        return frozenset(self.carrier - o for o in self.opens)

    def limit_points(self, s) -> frozenset:
        """Points p whose every open neighborhood meets s away from p."""
        s = frozenset(s)
        if not s <= self.carrier:
            raise InputError(f"{set(s)} is not a subset of the carrier")
        out = set()
        for p in self.carrier:
            if all((s - {p}) & o for o in self.opens if p in o):
                out.add(p)
        return frozenset(out)

    def interior(self, s) -> frozenset:
        s = frozenset(s)
        inside = [o for o in self.opens if o <= s]
        return frozenset().union(*inside) if inside else frozenset()

    def closure(self, s) -> frozenset:
        s = frozenset(s)
        return s | self.limit_points(s)

    def boundary(self, s) -> frozenset:
        return self.closure(s) - self.interior(s)

    def operators(self, s):
        """(interior, boundary, closure) of a subset."""
        return self.interior(s), self.boundary(s), self.closure(s)

    def is_connected(self) -> bool:
        """No proper nonempty clopen subset exists."""
        for o in self.opens:
            if o and o != self.carrier and self.is_closed(o):
                return False
        return True

    def subsets(self):
        return [frozenset(s) for s in _powerset(sorted(self.carrier))]


def build_cartan_topology(seq: PfaffSequence) -> FiniteTopology:
    """Topology on the supports of the leading sequence elements A, F, H, K.

    Basis {A, A|F, H, H|K} intersected with the carrier; d_map A->F, H->K.
    With all four labels present this realizes nine open sets and nine
    closed sets.
    """
    carrier = {e.label for e in seq.elements[:4] if e.nonvanishing}
    if not carrier:
        raise InputError("every sequence element vanishes; empty carrier")
    return FiniteTopology.from_basis(
        carrier,
        [{"A"}, {"A", "F"}, {"H"}, {"H", "K"}],
        {"A": {"F"}, "F": set(), "H": {"K"}, "K": set()},
    )


def verify_d_is_limit_operator(t: FiniteTopology) -> bool:
    """Check limit_points(s) == union of d_map over s, for every subset."""
    for s in t.subsets():
        image = frozenset().union(*(t.d_map[p] for p in s)) if s else frozenset()
        if t.limit_points(s) != image:
            return False
    return True


def limit_points(t: FiniteTopology, s) -> frozenset:
    return t.limit_points(s)


def topo_operators(t: FiniteTopology, s):
    """(interior, boundary, closure) of a subset."""
    return t.operators(s)


def is_connected(t: FiniteTopology) -> bool:
    return t.is_connected()


def map_continuous(src: FiniteTopology, dst: FiniteTopology, f: dict) -> bool:
    """Closure-commutation continuity test.

    True iff f[closure(s)] is contained in closure(f[s]) for every subset
    s of the source carrier.
    """
    for p in src.carrier:
        if f.get(p) not in dst.carrier:
            raise InputError(f"map does not send '{p}' into the target carrier")
    for s in src.subsets():
        image_of_closure = frozenset(f[p] for p in src.closure(s))
        closure_of_image = dst.closure(frozenset(f[p] for p in s))
        if not image_of_closure <= closure_of_image:
            return False
    return True
