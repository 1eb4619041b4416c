"""FastAPI service wrapping the library, plus the plain handler layer.

Each endpoint delegates to a handler taking and returning the pydantic
models of :mod:`frontkit.schemas`; the CLI calls the same handlers
in-process, so the two surfaces cannot drift apart.  Library errors map
to JSON error bodies: parse problems give 400, precondition violations
and numerical failures give 422 with a machine-readable ``kind``.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import edgeinv, focal, frame, gaussbonnet, normalform, symmetry
from .errors import FrontkitError, NumericalError, ParseError, PreconditionError
from .schemas import (
    AxisAsymptoticsModel,
    AxisBoundednessModel,
    FocalClassifyRequest,
    FocalClassifyResponse,
    FocalScanRequest,
    FocalScanResponse,
    FrameRequest,
    FrameResponse,
    GBRequest,
    GBResponse,
    GermDocument,
    InvariantRow,
    InvariantsRequest,
    InvariantsResponse,
    ReduceRequest,
    ReduceResponse,
    SectorModel,
    SurfaceSampleRequest,
    SurfaceSampleResponse,
    SymmetryRequest,
    SymmetryResponse,
    TransformModel,
)

#: smallest truncation degree at which the focal A4 conditions are visible
FOCAL_MIN_DEGREE = 5


def handle_reduce(req: ReduceRequest) -> ReduceResponse:
    m = req.germ.to_map_germ()
    result = normalform.reduce(m, degree=req.degree)
    doc = GermDocument.from_normal_form(result.normal_form)
    return ReduceResponse(
        normal_form=doc.normal_form,
        transform=TransformModel.from_record(result.transform),
        residual=result.residual,
        canonical=result.canonical,
    )


def handle_frame(req: FrameRequest) -> FrameResponse:
    nf = req.germ.to_normal_form()
    ff = frame.fundamental_forms(nf, req.point)
    K, H = frame.curvatures(nf, req.point)
    return FrameResponse(
        K=K, H=H, nu=[float(v) for v in ff.nu], E=ff.E, F=ff.F, G=ff.G, L=ff.L, M=ff.M, N=ff.N
    )


def handle_invariants(req: InvariantsRequest) -> InvariantsResponse:
    nf = req.germ.to_normal_form()
    rows = []
    for axis in edgeinv.AXES:
        for t in req.samples:
            inv = edgeinv.edge_invariants_at(nf, axis, t)
            rows.append(
                InvariantRow(
                    axis=axis,
                    t=t,
                    kappa_s=inv.kappa_s,
                    kappa_nu=inv.kappa_nu,
                    kappa_t=inv.kappa_t,
                    kappa_c=inv.kappa_c,
                )
            )
    asym = edgeinv.invariant_asymptotics(nf)
    asym_model = {
        axis: AxisAsymptoticsModel(
            t_kappa_s=list(asym.axis(axis).t_kappa_s.coeffs),
            t_kappa_nu=list(asym.axis(axis).t_kappa_nu.coeffs),
            t_kappa_t=list(asym.axis(axis).t_kappa_t.coeffs),
            kappa_c=list(asym.axis(axis).kappa_c.coeffs),
        )
        for axis in edgeinv.AXES
    }
    report = edgeinv.boundedness_report(nf)
    bound_model = {
        axis: AxisBoundednessModel(
            kappa_s_bounded=report.axis(axis).kappa_s_bounded,
            kappa_s_zero_limit=report.axis(axis).kappa_s_zero_limit,
            kappa_nu_bounded=report.axis(axis).kappa_nu_bounded,
            kappa_t_bounded=report.axis(axis).kappa_t_bounded,
            kappa_c_zero=report.axis(axis).kappa_c_zero,
        )
        for axis in edgeinv.AXES
    }
    omegas = edgeinv.projected_cuspidal_curvatures(nf)
    return InvariantsResponse(
        rows=rows,
        asymptotics=asym_model,
        boundedness=bound_model,
        vertex_angle=edgeinv.vertex_angle(nf),
        projected_cuspidal_curvatures={
            "omega_u_normal": omegas.omega_u_normal,
            "omega_u_center": omegas.omega_u_center,
            "omega_v_normal": omegas.omega_v_normal,
            "omega_v_center": omegas.omega_v_center,
        },
    )


def handle_symmetry(req: SymmetryRequest) -> SymmetryResponse:
    nf = req.germ.to_normal_form()
    flags = symmetry.detect_symmetries(nf, tol=req.tol)
    residuals = symmetry.symmetry_residuals(nf)
    image = {name: symmetry.verify_symmetry_on_image(nf, name) for name in symmetry.MOVES}
    return SymmetryResponse(
        flags={name: flags.flag(name) for name in symmetry.MOVES},
        parity_residuals=residuals,
        image_residuals=image,
    )


def handle_gb(req: GBRequest) -> GBResponse:
    nf = req.germ.to_normal_form()
    agg = gaussbonnet.four_sector_report(nf, req.radius, req.mesh)
    return GBResponse(
        sectors=[
            SectorModel(
                quadrant=s.quadrant,
                K_integral=s.K_integral,
                edge_integrals=s.edge_integrals,
                arc_integral=s.arc_integral,
                vertex_interior_angle=s.vertex_interior_angle,
                vertex_exterior_angle=s.vertex_exterior_angle,
                corner_exterior_angles=list(s.corner_exterior_angles),
                boundary_sum=s.boundary_sum,
                residual=s.residual,
            )
            for s in agg.sectors
        ],
        defect=agg.defect,
        total_sum=agg.total_sum,
        aggregate_residual=agg.aggregate_residual,
    )


def _require_focal_degree(nf):
    if nf.degree < FOCAL_MIN_DEGREE:
        raise PreconditionError(
            f"focal classification needs jet degree >= {FOCAL_MIN_DEGREE}, got {nf.degree}"
        )


def handle_focal_classify(req: FocalClassifyRequest) -> FocalClassifyResponse:
    nf = req.germ.to_normal_form()
    _require_focal_degree(nf)
    result = focal.classify_focal_point(nf, req.x, tol=req.tol)
    return FocalClassifyResponse(label=result.label, witness=jsonable_encoder(result.witness))


def handle_focal_scan(req: FocalScanRequest) -> FocalScanResponse:
    nf = req.germ.to_normal_form()
    _require_focal_degree(nf)
    rows = focal.focal_scan(nf, req.box, req.step, tol=req.tol)
    return FocalScanResponse(rows=rows)


def handle_surface_sample(req: SurfaceSampleRequest) -> SurfaceSampleResponse:
    if req.n < 2:
        raise PreconditionError(f"surface sample needs n >= 2, got {req.n}")
    m = req.germ.to_map_germ()
    grid = np.linspace(-req.radius, req.radius, req.n)
    uu, vv = np.meshgrid(grid, grid, indexing="ij")
    vals = m.evaluate((uu.ravel(), vv.ravel()))
    rows = [
        [float(u), float(v), float(x), float(y), float(z)]
        for u, v, x, y, z in zip(uu.ravel(), vv.ravel(), *vals)
    ]
    return SurfaceSampleResponse(rows=rows)


# -- FastAPI wiring ----------------------------------------------------------


def create_app() -> FastAPI:
    app = FastAPI(
        title="frontkit",
        description="Normal forms and invariants of D4+ wave-front singularities",
        version="0.1.0",
    )

    @app.exception_handler(FrontkitError)
    async def _frontkit_error(request: Request, exc: FrontkitError):
        if isinstance(exc, ParseError):
            kind, status = "parse", 400
        elif isinstance(exc, NumericalError):
            kind, status = "numerical", 422
        else:
            kind, status = "precondition", 422
        return JSONResponse(status_code=status, content={"error": {"kind": kind, "message": str(exc)}})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": {"kind": "parse", "message": str(exc)}}
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/reduce", response_model=ReduceResponse)
    def reduce_endpoint(req: ReduceRequest):
        return handle_reduce(req)

    @app.post("/frame", response_model=FrameResponse)
    def frame_endpoint(req: FrameRequest):
        return handle_frame(req)

    @app.post("/invariants", response_model=InvariantsResponse)
    def invariants_endpoint(req: InvariantsRequest):
        return handle_invariants(req)

    @app.post("/symmetry", response_model=SymmetryResponse)
    def symmetry_endpoint(req: SymmetryRequest):
        return handle_symmetry(req)

    @app.post("/gaussbonnet", response_model=GBResponse)
    def gb_endpoint(req: GBRequest):
        return handle_gb(req)

    @app.post("/focal/classify", response_model=FocalClassifyResponse)
    def focal_classify_endpoint(req: FocalClassifyRequest):
        return handle_focal_classify(req)

    @app.post("/focal/scan", response_model=FocalScanResponse)
    def focal_scan_endpoint(req: FocalScanRequest):
        return handle_focal_scan(req)

    @app.post("/surface/sample", response_model=SurfaceSampleResponse)
    def surface_sample_endpoint(req: SurfaceSampleRequest):
        return handle_surface_sample(req)

    return app


app = create_app()
