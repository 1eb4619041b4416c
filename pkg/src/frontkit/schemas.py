"""Pydantic request/response models shared by the service and the CLI.

The wire format mirrors the on-disk JSON: series are a degree plus a
list of [i, j, coefficient] triples, germs come either raw (components
x, y, z) or as normal-form coefficient data under the "normal_form"
key.  Converters to and from the domain objects live here so the
service handlers stay thin.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ParseError
from .germ import (
    MapGerm,
    NormalFormGerm,
    TransformRecord,
    expand,
    germ_from_json,
    normal_form_from_json,
)
from .series import TruncatedSeries1, TruncatedSeries2


class Series2Model(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: int
    terms: list[list[float]] = Field(default_factory=list)

    @classmethod
    def from_series(cls, s: TruncatedSeries2) -> "Series2Model":
        return cls(degree=s.degree, terms=[[i, j, c] for i, j, c in s.terms()])

    def to_series(self) -> TruncatedSeries2:
        return TruncatedSeries2.from_json({"degree": self.degree, "terms": self.terms})


class Series1Model(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: int
    coeffs: list[float] = Field(default_factory=list)

    @classmethod
    def from_series(cls, s: TruncatedSeries1) -> "Series1Model":
        return cls(degree=s.degree, coeffs=[float(c) for c in s.coeffs])

    def to_series(self) -> TruncatedSeries1:
        return TruncatedSeries1(self.degree, self.coeffs)


class NormalFormBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degree: int
    a: float
    b1: Series1Model
    b2: Series2Model
    b3: Series1Model
    c1: Series1Model
    c2: Series2Model
    c3: Series1Model


class GermDocument(BaseModel):
    """Either a raw germ {degree, x, y, z} or {normal_form: {...}}."""

    model_config = ConfigDict(extra="forbid")

    degree: Optional[int] = None
    x: Optional[Series2Model] = None
    y: Optional[Series2Model] = None
    z: Optional[Series2Model] = None
    normal_form: Optional[NormalFormBody] = None

    @model_validator(mode="after")
    def _one_of_two_forms(self):
        raw = all(v is not None for v in (self.degree, self.x, self.y, self.z))
        if self.normal_form is None and not raw:
            raise ValueError("germ document needs either x/y/z/degree or normal_form")
        if self.normal_form is not None and any(v is not None for v in (self.x, self.y, self.z)):
            raise ValueError("germ document cannot carry both raw components and normal_form")
        return self

    def to_map_germ(self) -> MapGerm:
        if self.normal_form is not None:
            return expand(self.to_normal_form())
        return germ_from_json(
            {
                "degree": self.degree,
                "x": self.x.model_dump(),
                "y": self.y.model_dump(),
                "z": self.z.model_dump(),
            }
        )

    def to_normal_form(self) -> NormalFormGerm:
        """Normal-form data; raw germs are reduced first."""
        if self.normal_form is not None:
            return normal_form_from_json({"normal_form": self.normal_form.model_dump()})
        from .normalform import reduce

        return reduce(self.to_map_germ()).normal_form

    @classmethod
    def from_normal_form(cls, nf: NormalFormGerm) -> "GermDocument":
        return cls(
            normal_form=NormalFormBody(
                degree=nf.degree,
                a=nf.a,
                b1=Series1Model.from_series(nf.b1),
                b2=Series2Model.from_series(nf.b2),
                b3=Series1Model.from_series(nf.b3),
                c1=Series1Model.from_series(nf.c1),
                c2=Series2Model.from_series(nf.c2),
                c3=Series1Model.from_series(nf.c3),
            )
        )

    @classmethod
    def from_map_germ(cls, m: MapGerm) -> "GermDocument":
        return cls(
            degree=m.degree,
            x=Series2Model.from_series(m.x),
            y=Series2Model.from_series(m.y),
            z=Series2Model.from_series(m.z),
        )


def parse_germ_document(data: dict) -> GermDocument:
    """Parse a germ document, tolerating sibling report fields.

    A reduce response can be fed straight back in: when a "normal_form"
    key is present the other top-level keys (transform, residual, ...)
    are ignored.
    """
    if isinstance(data, dict) and "normal_form" in data:
        data = {"normal_form": data["normal_form"]}
    try:
        return GermDocument.model_validate(data)
    except Exception as exc:
        raise ParseError(f"invalid germ document: {exc}") from exc


class TransformModel(BaseModel):
    rotation: list[list[float]]
    source_u: Series2Model
    source_v: Series2Model

    @classmethod
    def from_record(cls, t: TransformRecord) -> "TransformModel":
        return cls(
            rotation=[[float(v) for v in row] for row in t.rotation],
            source_u=Series2Model.from_series(t.source_u),
            source_v=Series2Model.from_series(t.source_v),
        )


# -- request/response pairs ------------------------------------------------


class ReduceRequest(BaseModel):
    germ: GermDocument
    degree: Optional[int] = None


class ReduceResponse(BaseModel):
    normal_form: NormalFormBody
    transform: TransformModel
    residual: float
    canonical: bool


class FrameRequest(BaseModel):
    germ: GermDocument
    point: tuple[float, float]


class FrameResponse(BaseModel):
    K: float
    H: float
    nu: list[float]
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float


class InvariantsRequest(BaseModel):
    germ: GermDocument
    samples: list[float] = Field(default_factory=lambda: [0.1, 0.05, 0.01])


class InvariantRow(BaseModel):
    axis: str
    t: float
    kappa_s: float
    kappa_nu: float
    kappa_t: float
    kappa_c: float


class AxisAsymptoticsModel(BaseModel):
    t_kappa_s: list[float]
    t_kappa_nu: list[float]
    t_kappa_t: list[float]
    kappa_c: list[float]


class AxisBoundednessModel(BaseModel):
    kappa_s_bounded: bool
    kappa_s_zero_limit: bool
    kappa_nu_bounded: bool
    kappa_t_bounded: bool
    kappa_c_zero: bool


class InvariantsResponse(BaseModel):
    rows: list[InvariantRow]
    asymptotics: dict[str, AxisAsymptoticsModel]
    boundedness: dict[str, AxisBoundednessModel]
    vertex_angle: float
    projected_cuspidal_curvatures: dict[str, float]


class SymmetryRequest(BaseModel):
    germ: GermDocument
    tol: float = 1e-9


class SymmetryResponse(BaseModel):
    flags: dict[str, bool]
    parity_residuals: dict[str, float]
    image_residuals: dict[str, float]


class GBRequest(BaseModel):
    germ: GermDocument
    radius: float = 0.3
    mesh: int = 200


class SectorModel(BaseModel):
    quadrant: str
    K_integral: float
    edge_integrals: dict[str, float]
    arc_integral: float
    vertex_interior_angle: float
    vertex_exterior_angle: float
    corner_exterior_angles: list[float]
    boundary_sum: float
    residual: float


class GBResponse(BaseModel):
    sectors: list[SectorModel]
    defect: float
    total_sum: float
    aggregate_residual: float


class FocalClassifyRequest(BaseModel):
    germ: GermDocument
    x: tuple[float, float, float]
    tol: float = 1e-9


class FocalClassifyResponse(BaseModel):
    label: str
    witness: dict


class FocalScanRequest(BaseModel):
    germ: GermDocument
    box: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    step: float
    tol: float = 1e-9


class FocalScanResponse(BaseModel):
    rows: list[tuple[float, float, float, str]]


class SurfaceSampleRequest(BaseModel):
    germ: GermDocument
    radius: float = 0.5
    n: int = 40


class SurfaceSampleResponse(BaseModel):
    rows: list[list[float]]  # u, v, x, y, z
