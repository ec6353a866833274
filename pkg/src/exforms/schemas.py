"""Pydantic request and response models.

These are the wire format of the HTTP service and the schema of the
CLI's input files and machine-readable reports.  Expression fields carry
text in the package grammar; validation of the text itself happens when
the spec is compiled into kernel objects.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class ToleranceSpec(BaseModel):
    abs: float = Field(1e-9, gt=0.0)
    rel: float = Field(1e-9, ge=0.0)


class FormSpec(BaseModel):
    """A 1-form over named variables plus the sampling region.

    ``one_form`` maps differential symbols ("dx", "dy", ...) to
    coefficient expressions; ``phi`` optionally supplies the scalar
    potential of the a.dr - phi dt split instead of a "dt" entry.
    """

    variables: List[str] = Field(..., min_length=1)
    one_form: Dict[str, str]
    phi: Optional[str] = None
    box: Dict[str, Tuple[float, float]]
    samples: int = Field(100, ge=1)
    seed: int = 0
    tolerances: ToleranceSpec = ToleranceSpec()
    exclusion: Optional[str] = None
    exclusion_min: float = Field(0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_keys(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variables must be distinct")
        allowed = {"d" + v for v in self.variables}
        for key in self.one_form:
            if key not in allowed:
                raise ValueError(
                    f"one_form key '{key}' is not d<variable> for variables {self.variables}"
                )
        if self.phi is not None and "d" + self.variables[-1] in self.one_form:
            raise ValueError(
                "give either a phi block or an explicit time component, not both"
            )
        missing = [v for v in self.variables if v not in self.box]
        if missing:
            raise ValueError(f"box is missing bounds for {missing}")
        return self


class QuadratureModel(BaseModel):
    rule: Literal["simpson", "trapezoid"] = "simpson"
    panels: int = Field(64, ge=8)
    refinements: int = Field(0, ge=0)
    tol: float = Field(1e-10, gt=0.0)


class SignatureModel(BaseModel):
    signs: List[int] = [1, 1, 1]
    p: float = Field(2.0, ge=1.0)
    coefficients: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self):
        if not any(s > 0 for s in self.signs):
            raise ValueError("signature needs at least one + sign")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        if self.coefficients is not None and len(self.coefficients) != len(self.signs):
            raise ValueError("one coefficient per sign required")
        return self


class CurveModel(BaseModel):
    parameter: str
    period: float = Field(..., gt=0.0)
    components: List[str]


class CurveSetSpec(BaseModel):
    """Closed curves plus quadrature, signature and constants blocks."""

    variables: List[str] = ["x", "y", "z"]
    curves: List[CurveModel] = Field(..., min_length=1)
    quadrature: QuadratureModel = QuadratureModel()
    signature: SignatureModel = SignatureModel()
    constants: Dict[str, float] = {}


class ClebschPair(BaseModel):
    phi: str
    psi: str


class CirculationSpec(BaseModel):
    """Circulation input: a 1-form (or a two-function pair) and one curve."""

    variables: List[str]
    one_form: Optional[Dict[str, str]] = None
    clebsch: Optional[ClebschPair] = None
    curves: List[CurveModel] = Field(..., min_length=1)
    quadrature: QuadratureModel = QuadratureModel()
    signature: SignatureModel = SignatureModel()

    @model_validator(mode="after")
    def _check(self):
        if (self.one_form is None) == (self.clebsch is None):
            raise ValueError("give exactly one of one_form or clebsch")
        return self


class FluidBlock(BaseModel):
    v: List[str] = Field(..., min_length=3, max_length=3)
    psi: str = "0"
    nu: float = Field(0.0, ge=0.0)


class EMBlock(BaseModel):
    a: List[str] = Field(..., min_length=3, max_length=3)
    phi: str = "0"
    velocity: Optional[List[str]] = None      # enables the frozen-in residuals


class PhysicsSpec(BaseModel):
    variables: List[str] = ["x", "y", "z", "t"]
    fluid: Optional[FluidBlock] = None
    em: Optional[EMBlock] = None
    box: Optional[Dict[str, Tuple[float, float]]] = None
    samples: int = Field(100, ge=1)
    seed: int = 0
    tolerances: ToleranceSpec = ToleranceSpec()

    @model_validator(mode="after")
    def _check(self):
        if self.fluid is None and self.em is None:
            raise ValueError("give a fluid block, an em block, or both")
        if len(self.variables) != 4:
            raise ValueError("physics diagnostics run over 4 variables")
        return self


# -- reports ---------------------------------------------------------------------


class WitnessReport(BaseModel):
    point: Dict[str, float]
    component: Optional[str] = None
    value: float


class SequenceElementReport(BaseModel):
    label: str
    degree: int
    nonvanishing: bool
    form: str
    witness: Optional[WitnessReport] = None


class SubsetReport(BaseModel):
    subset: List[str]
    limit_points: List[str]
    interior: List[str]
    boundary: List[str]
    closure: List[str]


class TopologyReport(BaseModel):
    carrier: List[str]
    opens: List[List[str]]
    closeds: List[List[str]]
    table: List[SubsetReport]
    d_is_limit_operator: bool
    connected: bool


class TorsionReport(BaseModel):
    T: List[str]
    h: str


class AnalysisReport(BaseModel):
    status: Literal["ok", "inconclusive"] = "ok"
    variables: List[str]
    one_form: str = ""
    pfaff_dimension: Optional[int] = None
    sequence: List[SequenceElementReport] = []
    torsion: Optional[TorsionReport] = None
    parity: Optional[str] = None
    connectedness: Optional[Literal["connected", "disconnected"]] = None
    topology: Optional[TopologyReport] = None
    warnings: List[str] = []


class ConvergenceRow(BaseModel):
    panels: int
    value: float


class IntegralReport(BaseModel):
    kind: Literal["circulation", "linking", "braid"]
    value: float
    error_estimate: Optional[float] = None
    nearest_integer: Optional[int] = None
    integer_residual: Optional[float] = None
    convergence: List[ConvergenceRow] = []
    warnings: List[str] = []


class HelicityReport(BaseModel):
    h: str
    T: List[str]
    conservation_residual: str
    parity_form_vanishes: bool


class FluidReport(BaseModel):
    vorticity: List[str]
    divergence: str
    euler_residual: List[str]
    helmholtz_residual: List[str]
    ns_residual: List[str]
    parity: str
    parity_at_origin: Optional[float] = None
    classification: str
    helicity: HelicityReport


class EMReport(BaseModel):
    E: List[str]
    B: List[str]
    faraday_residual: List[str]
    div_B: str
    master_r1: Optional[List[str]] = None
    master_r2: Optional[List[str]] = None


class PhysicsReport(BaseModel):
    status: Literal["ok", "inconclusive"] = "ok"
    variables: List[str]
    fluid: Optional[FluidReport] = None
    em: Optional[EMReport] = None
    warnings: List[str] = []


class ErrorDetail(BaseModel):
    code: Literal["input", "inconclusive", "singularity"]
    message: str
