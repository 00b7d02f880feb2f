"""HTTP annotation service backing the interactive labeling UI.

Sessions live in memory. Every contour edit triggers a full recompute
(contour -> mask -> centerline -> fitted curve -> angles), which keeps the
stored curve and angles consistent with the annotation by construction.
A per-session version counter lets clients detect lost updates.
"""

from __future__ import annotations

import base64
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .bspline import BSplineCurve, BSplineError
from .cobb import AngleTriple, CobbError
from .fitting import FitConfig, FitError, fit_clamped_bspline
from .mask import (
    BinaryMask,
    ContourAnnotation,
    ContourError,
    MaskError,
    clean_mask,
    contour_to_mask,
    mask_from_bytes,
    mask_to_contour,
    mask_to_png_bytes,
)
from .pipeline import (
    CurveAnalysis,
    PipelineConfig,
    analysis_to_dict,
    analyze_curve,
    analyze_points,
    centerline_from_mask,
)

DEFAULT_WIDTH = 256
DEFAULT_HEIGHT = 512


class ServiceError(Exception):
    """Carries an HTTP status plus the error payload shape."""

    def __init__(self, status: int, error: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.error = error
        self.detail = detail


class ContourBody(BaseModel):
    left: list[tuple[float, float]]
    right: list[tuple[float, float]]


class CreateSessionBody(BaseModel):
    contour: ContourBody | None = None
    mask_base64: str | None = None
    width: int | None = None
    height: int | None = None


class GtAnglesBody(BaseModel):
    mt: float
    pt: float
    tl: float


class FitBody(BaseModel):
    points: list[tuple[float, float]]
    fit: dict | None = None


class AnglesBody(BaseModel):
    curve: dict | None = None
    points: list[tuple[float, float]] | None = None
    regression: GtAnglesBody | None = None
    alpha: dict | None = None
    epsilon: float | None = None
    sample_count: int | None = None


@dataclass
class Session:
    session_id: str
    width: int
    height: int
    annotation: ContourAnnotation
    analysis: CurveAnalysis
    gt_angles: AngleTriple | None = None
    version: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock)


def resolve_ui_dir(explicit: str | None = None) -> Path | None:
    """UI assets directory: explicit flag > SPINECURVE_UI_DIR > ./frontend/dist."""
    candidates = [explicit, os.environ.get("SPINECURVE_UI_DIR"), "frontend/dist"]
    for candidate in candidates:
        if candidate and Path(candidate).is_dir():
            return Path(candidate)
    return None


def create_app(
    config: PipelineConfig | None = None, ui_dir: str | Path | None = None
) -> FastAPI:
    config = config or PipelineConfig()
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    app = FastAPI(title="spinecurve annotation service")

    def _error_response(status: int, error: str, detail: str) -> JSONResponse:
        return JSONResponse({"error": error, "detail": detail}, status_code=status)

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return _error_response(exc.status, exc.error, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(422, "invalid request", str(exc))

    for geometry_error in (ContourError, MaskError, FitError, CobbError, BSplineError):

        @app.exception_handler(geometry_error)
        async def _geometry_error(request: Request, exc: Exception):
            return _error_response(422, "invalid geometry", str(exc))

    def _recompute(annotation: ContourAnnotation, width: int, height: int) -> CurveAnalysis:
        mask = contour_to_mask(annotation, width, height)
        points = centerline_from_mask(mask, config)
        return analyze_points(points, config)

    def _get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "unknown session", f"no session {session_id}")
        return session

    def _session_payload(session: Session) -> dict:
        payload = {
            "session_id": session.session_id,
            "version": session.version,
            "width": session.width,
            "height": session.height,
            "annotation": session.annotation.to_dict(),
            "gt_angles": session.gt_angles.to_dict() if session.gt_angles else None,
        }
        payload.update(analysis_to_dict(session.analysis))
        return payload

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if (body.contour is None) == (body.mask_base64 is None):
            raise ServiceError(
                422, "invalid request",
                "provide exactly one of 'contour' or 'mask_base64'",
            )
        if body.contour is not None:
            width = body.width or DEFAULT_WIDTH
            height = body.height or DEFAULT_HEIGHT
            annotation = ContourAnnotation(
                tuple(body.contour.left), tuple(body.contour.right)
            )
        else:
            try:
                raw = base64.b64decode(body.mask_base64, validate=True)
            except (ValueError, TypeError) as exc:
                raise ServiceError(
                    422, "invalid request", f"mask_base64 is not valid base64: {exc}"
                ) from exc
            mask = clean_mask(mask_from_bytes(raw))
            width = body.width or mask.width
            height = body.height or mask.height
            annotation = mask_to_contour(mask)
        analysis = _recompute(annotation, width, height)
        session = Session(
            session_id=uuid.uuid4().hex,
            width=width,
            height=height,
            annotation=annotation,
            analysis=analysis,
        )
        with registry_lock:
            sessions[session.session_id] = session
        return _session_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_payload(_get_session(session_id))

    @app.put("/sessions/{session_id}/contour")
    def put_contour(session_id: str, body: ContourBody):
        session = _get_session(session_id)
        annotation = ContourAnnotation(tuple(body.left), tuple(body.right))
        analysis = _recompute(annotation, session.width, session.height)
        with session.lock:
            session.annotation = annotation
            session.analysis = analysis
            session.version += 1
            return _session_payload(session)

    @app.put("/sessions/{session_id}/gt-angles")
    def put_gt_angles(session_id: str, body: GtAnglesBody):
        session = _get_session(session_id)
        triple = AngleTriple(body.mt, body.pt, body.tl)
        with session.lock:
            session.gt_angles = triple
            session.version += 1
            return _session_payload(session)

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            mask = contour_to_mask(session.annotation, session.width, session.height)
            payload = _session_payload(session)
            payload["mask_base64"] = base64.b64encode(
                mask_to_png_bytes(mask)
            ).decode("ascii")
            return payload

    @app.post("/fit")
    def fit_once(body: FitBody):
        fit_config = (
            FitConfig.from_dict(body.fit, base=config.fit) if body.fit else config.fit
        )
        return fit_clamped_bspline(body.points, fit_config).to_dict()

    @app.post("/angles")
    def angles_once(body: AnglesBody):
        if (body.curve is None) == (body.points is None):
            raise ServiceError(
                422, "invalid request",
                "provide exactly one of 'curve' or 'points'",
            )
        request_config = config
        overrides: dict = {}
        if body.epsilon is not None:
            overrides["epsilon"] = body.epsilon
        if body.sample_count is not None:
            overrides["sample_count"] = body.sample_count
        if body.alpha is not None:
            overrides["alpha"] = body.alpha
        if overrides:
            request_config = PipelineConfig.from_dict(overrides, base=config)
        regression = None
        if body.regression is not None:
            regression = AngleTriple(
                body.regression.mt, body.regression.pt, body.regression.tl
            )
        if body.curve is not None:
            analysis = analyze_curve(
                BSplineCurve.from_dict(body.curve), request_config, regression
            )
        else:
            analysis = analyze_points(body.points, request_config, regression)
        return {
            "angles": analysis.angles.to_dict(),
            "slope_angles": analysis.slope_angles.to_dict(),
            "slope_samples": analysis_to_dict(analysis)["slope_samples"],
        }

    resolved_ui = ui_dir if ui_dir is None or isinstance(ui_dir, Path) else Path(ui_dir)
    if resolved_ui and resolved_ui.is_dir():
        app.mount("/ui", StaticFiles(directory=str(resolved_ui), html=True), name="ui")

    return app
