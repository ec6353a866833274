"""Exterior differential systems as executable machinery.

Symbolic differential forms with exact exterior calculus, the Pfaff
sequence and its finite support topology, field-theory residual
diagnostics, and numerical period integrals over closed chains.
"""

from .expressions import (
    SampleBox,
    ScalarExpr,
    TolerancePolicy,
    ZeroVerdict,
    is_zero,
    parse_expr,
    partial,
)
from .forms import (
    DifferentialForm,
    SmoothMap,
    VectorField,
    ext_d,
    form_is_zero,
    interior,
    lie,
    pullback,
    wedge,
)
from .pfaff import (
    FiniteTopology,
    PfaffReport,
    PfaffSequence,
    analyze_action,
    build_cartan_topology,
    is_connected,
    limit_points,
    map_continuous,
    pfaff_sequence,
    topo_operators,
    torsion_current,
    verify_d_is_limit_operator,
)
from .periods import (
    ClosedCurve,
    QuadratureSpec,
    SignatureSpec,
    braid_integral,
    circulate,
    clebsch_circulation,
    cofactor_adjoint_current,
    gauss_linking,
    holder_current,
)

__version__ = "0.1.0"
