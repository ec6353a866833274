"""Service-layer handlers: compile validated specs into kernel objects,
run the analyses, and assemble report models.

Both the HTTP routes and the CLI call these functions; the CLI adds file
handling and exit codes, the service adds status-code mapping.
"""

from __future__ import annotations

from . import expressions as ex
from . import schemas as sc
from .errors import InputError
from .expressions import SampleBox, TolerancePolicy, parse_expr
from .forms import DifferentialForm, format_form
from .pfaff import (
    PfaffReport,
    analyze_action,
    build_cartan_topology,
    verify_d_is_limit_operator,
)
from .periods import (
    ClosedCurve,
    IntegralResult,
    QuadratureSpec,
    SignatureSpec,
    braid_integral,
    circulate,
    clebsch_circulation,
    gauss_linking,
)
from . import physics as ph

_LABEL_ORDER = {"A": 0, "F": 1, "H": 2, "K": 3}


def _label_key(name: str):
    return (_LABEL_ORDER.get(name, 99), name)


def _sorted_labels(s):
    return sorted(s, key=_label_key)


def _compile(texts, variables, what):
    try:
        return [parse_expr(t, variables) for t in texts]
    except InputError as e:
        raise InputError(f"{what}: {e}") from e


def _box_from_spec(variables, box, samples, seed) -> SampleBox:
    lows = tuple(float(box[v][0]) for v in variables)
    highs = tuple(float(box[v][1]) for v in variables)
    return SampleBox(tuple(variables), lows, highs, samples, seed)


def _policy_from_spec(variables, tol: sc.ToleranceSpec, exclusion, exclusion_min) -> TolerancePolicy:
    excl = None
    if exclusion:
        excl = _compile([exclusion], tuple(variables), "exclusion")[0]
    return TolerancePolicy(tol.abs, tol.rel, excl, exclusion_min)


def compile_form_spec(spec: sc.FormSpec):
    """(A, box, policy) from a validated form spec."""
    variables = tuple(spec.variables)
    comps = []
    for i, v in enumerate(variables):
        text = spec.one_form.get("d" + v)
        comps.append(ex.ZERO if text is None else _compile([text], variables, f"d{v} coefficient")[0])
    if spec.phi is not None:
        phi = _compile([spec.phi], variables, "phi")[0]
        comps[-1] = ex.neg(phi)
    A = DifferentialForm.one_form(variables, comps)
    box = _box_from_spec(variables, spec.box, spec.samples, spec.seed)
    pol = _policy_from_spec(variables, spec.tolerances, spec.exclusion, spec.exclusion_min)
    return A, box, pol


def _topology_report(report: PfaffReport) -> sc.TopologyReport:
    t = build_cartan_topology(report.sequence)
    table = []
    for s in t.subsets():
        interior, boundary, closure = t.operators(s)
        table.append(
            sc.SubsetReport(
                subset=_sorted_labels(s),
                limit_points=_sorted_labels(t.limit_points(s)),
                interior=_sorted_labels(interior),
                boundary=_sorted_labels(boundary),
                closure=_sorted_labels(closure),
            )
        )
    table.sort(key=lambda r: (len(r.subset), [_label_key(x) for x in r.subset]))
    sets_sorted = lambda sets: sorted(
        (_sorted_labels(s) for s in sets), key=lambda v: (len(v), [_label_key(x) for x in v])
    )
    return sc.TopologyReport(
        carrier=_sorted_labels(t.carrier),
        opens=sets_sorted(t.opens),
        closeds=sets_sorted(t.closeds),
        table=table,
        d_is_limit_operator=verify_d_is_limit_operator(t),
        connected=t.is_connected(),
    )


def _sequence_report(report: PfaffReport):
    out = []
    for e in report.sequence.elements:
        witness = None
        if e.witness is not None:
            comp = None
            if e.witness_component is not None:
                comp = "^".join("d" + e.form.variables[i] for i in e.witness_component)
            witness = sc.WitnessReport(point=e.witness, component=comp, value=e.witness_value)
        out.append(
            sc.SequenceElementReport(
                label=e.label,
                degree=e.form.degree,
                nonvanishing=e.nonvanishing,
                form=format_form(e.form.simplify()),
                witness=witness,
            )
        )
    return out


def analyze(spec: sc.FormSpec) -> sc.AnalysisReport:
    """Full pipeline: sequence, dimension, torsion, parity, topology.

    An inconclusive zero test produces a partial report with status
    "inconclusive" instead of failing.
    """
    A, box, pol = compile_form_spec(spec)
    try:
        report = analyze_action(A, box, pol)
    except ex.InconclusiveZeroTest as e:
        return sc.AnalysisReport(
            status="inconclusive",
            variables=list(spec.variables),
            one_form=format_form(A),
            warnings=[str(e)],
        )
    torsion = None
    if report.torsion is not None:
        T, h = report.torsion
        torsion = sc.TorsionReport(T=[str(c) for c in T], h=str(h))
    return sc.AnalysisReport(
        variables=list(spec.variables),
        one_form=format_form(A),
        pfaff_dimension=report.dimension,
        sequence=_sequence_report(report),
        torsion=torsion,
        parity=None if report.parity is None else str(report.parity.simplify()),
        connectedness="connected" if report.connected else "disconnected",
        topology=_topology_report(report),
    )


def topology(spec: sc.FormSpec) -> sc.AnalysisReport:
    """The analyze pipeline reported through its topology tables only."""
    full = analyze(spec)
    return sc.AnalysisReport(
        status=full.status,
        variables=full.variables,
        one_form=full.one_form,
        pfaff_dimension=full.pfaff_dimension,
        connectedness=full.connectedness,
        topology=full.topology,
        warnings=full.warnings,
    )


def _curve_from_model(m: sc.CurveModel, n_ambient: int) -> ClosedCurve:
    comps = _compile(m.components, (m.parameter,), f"curve '{m.parameter}' components")
    if len(comps) != n_ambient:
        raise InputError(
            f"curve has {len(comps)} components; ambient dimension is {n_ambient}"
        )
    return ClosedCurve(m.parameter, m.period, tuple(comps))


def _quad(m: sc.QuadratureModel) -> QuadratureSpec:
    return QuadratureSpec(m.rule, m.panels, m.refinements, m.tol)


def _sig(m: sc.SignatureModel) -> SignatureSpec:
    return SignatureSpec(
        tuple(m.signs), m.p, None if m.coefficients is None else tuple(m.coefficients)
    )


def _integral_report(kind, res: IntegralResult, integernear=False) -> sc.IntegralReport:
    nearest = None
    residual = None
    if integernear:
        nearest = int(round(res.value))
        residual = res.value - nearest
    return sc.IntegralReport(
        kind=kind,
        value=res.value,
        error_estimate=res.error_estimate,
        nearest_integer=nearest,
        integer_residual=residual,
        convergence=[sc.ConvergenceRow(panels=p, value=v) for p, v in res.convergence],
    )


def circulation(spec: sc.CirculationSpec) -> sc.IntegralReport:
    variables = tuple(spec.variables)
    curve = _curve_from_model(spec.curves[0], len(variables))
    q = _quad(spec.quadrature)
    if spec.one_form is not None:
        comps = []
        for v in variables:
            text = spec.one_form.get("d" + v)
            comps.append(ex.ZERO if text is None else _compile([text], variables, f"d{v}")[0])
        A = DifferentialForm.one_form(variables, comps)
        res = circulate(A, curve, q)
    else:
        phi = _compile([spec.clebsch.phi], variables, "clebsch phi")[0]
        psi = _compile([spec.clebsch.psi], variables, "clebsch psi")[0]
        res = clebsch_circulation(phi, psi, _sig(spec.signature), curve, q, variables)
    return _integral_report("circulation", res)


def linking(spec: sc.CurveSetSpec) -> sc.IntegralReport:
    if len(spec.curves) < 2:
        raise InputError("linking needs two curves")
    c1 = _curve_from_model(spec.curves[0], 3)
    c2 = _curve_from_model(spec.curves[1], 3)
    res = gauss_linking(c1, c2, _sig(spec.signature), _quad(spec.quadrature))
    return _integral_report("linking", res, integernear=True)


def braid(spec: sc.CurveSetSpec) -> sc.IntegralReport:
    if len(spec.curves) < 3:
        raise InputError("braid needs three curves")
    curves = [_curve_from_model(m, 3) for m in spec.curves[:3]]
    e_over_c = float(spec.constants.get("E_over_c", 1.0))
    res = braid_integral(*curves, e_over_c, _sig(spec.signature), _quad(spec.quadrature))
    return _integral_report("braid", res)


def _fluid_report(block: sc.FluidBlock, variables, box, pol):
    v = _compile(block.v, variables, "velocity")
    psi = _compile([block.psi], variables, "psi")[0]
    f = ph.FluidState(tuple(v), psi, block.nu, variables)
    hd = ph.helicity_diagnostics(f, box, pol)
    cls = ph.classify_process(ph.flow_vector(f), ph.euler_action(f), box, pol)
    parity = ph.ns_parity(f)
    origin = {name: 0.0 for name in variables}
    try:
        parity_at_origin = float(parity.evaluate(origin))
    except ex.EvaluationError:
        parity_at_origin = None
    return sc.FluidReport(
        vorticity=[str(c) for c in f.vorticity],
        divergence=str(ph.divergence(f.v, variables).simplify()),
        euler_residual=[str(c) for c in ph.euler_residual(f)],
        helmholtz_residual=[str(c) for c in ph.helmholtz_residual(f)],
        ns_residual=[str(c) for c in ph.ns_residual(f)],
        parity=str(parity),
        parity_at_origin=parity_at_origin,
        classification=cls.value,
        helicity=sc.HelicityReport(
            h=str(hd.h),
            T=[str(c) for c in hd.T],
            conservation_residual=str(hd.conservation_residual),
            parity_form_vanishes=hd.dH_zero.identically_zero,
        ),
    )


def _em_report(block: sc.EMBlock, variables, box, pol):
    a = _compile(block.a, variables, "vector potential")
    phi = _compile([block.phi], variables, "phi")[0]
    p = ph.EMPotentials(tuple(a), phi, variables)
    E, B = ph.em_fields(p)
    r, divb = ph.maxwell_faraday_residual(p)
    r1 = r2 = None
    if block.velocity is not None:
        vel = _compile(block.velocity, variables, "velocity")
        m1, m2 = ph.master_residuals(p, vel)
        r1 = [str(c) for c in m1]
        r2 = [str(c) for c in m2]
    return sc.EMReport(
        E=[str(c) for c in E],
        B=[str(c) for c in B],
        faraday_residual=[str(c) for c in r],
        div_B=str(divb),
        master_r1=r1,
        master_r2=r2,
    )


def physics(spec: sc.PhysicsSpec) -> sc.PhysicsReport:
    variables = tuple(spec.variables)
    boxdict = spec.box or {v: (-1.0, 1.0) for v in variables}
    missing = [v for v in variables if v not in boxdict]
    if missing:
        raise InputError(f"box is missing bounds for {missing}")
    box = _box_from_spec(variables, boxdict, spec.samples, spec.seed)
    pol = _policy_from_spec(variables, spec.tolerances, None, 0.0)
    fluid = em = None
    warnings = []
    status = "ok"
    try:
        if spec.fluid is not None:
            fluid = _fluid_report(spec.fluid, variables, box, pol)
        if spec.em is not None:
            em = _em_report(spec.em, variables, box, pol)
    except ex.InconclusiveZeroTest as e:
        status = "inconclusive"
        warnings.append(str(e))
    return sc.PhysicsReport(
        status=status, variables=list(variables), fluid=fluid, em=em, warnings=warnings
    )
