"""Local HTTP API for the interactive workflow: upload, preview, calibrate, measure.

Sessions live in memory only; this is a single-user loopback tool. Errors are
always JSON {code, message} with the code naming the failure.
"""

from __future__ import annotations

import email.parser
import email.policy
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Literal, Optional, Tuple

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .errors import (
    CalibrationMissing,
    CorruptFile,
    DegenerateReference,
    EmptyMask,
    LeafMetricError,
    NonPositiveLength,
    RectOutOfBounds,
    UnsupportedFormat,
    ZeroDimension,
)
from .metrics import Calibration, CalibrationSource, ReferenceMeasurement, dpi_from_reference
from .pipeline import (
    DEFAULT_MIN_AREA,
    DEFAULT_THRESHOLD,
    OVERLAY_TINT,
    SegmentationParams,
    build_mask,
    measure_image,
    render_overlay,
)
from .raster import CropRect, RgbImage, decode_image, encode_png
from .segmentation import BackgroundPolarity

API_PREFIX = "/api/v1"
PREVIEW_BOUNDARY = "leafmetric-preview"

_STATUS_BY_ERROR = {
    UnsupportedFormat: 415,
    CorruptFile: 400,
    ZeroDimension: 400,
    RectOutOfBounds: 422,
    DegenerateReference: 422,
    NonPositiveLength: 422,
    EmptyMask: 422,
    CalibrationMissing: 409,
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Session:
    id: str
    image: RgbImage
    png: bytes
    crop: Optional[CropRect] = None
    polarity: BackgroundPolarity = BackgroundPolarity.WHITE
    threshold: int = DEFAULT_THRESHOLD
    min_area: int = DEFAULT_MIN_AREA
    calibration: Optional[Calibration] = None
    last_access: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def params(self) -> SegmentationParams:
        return SegmentationParams(
            crop=self.crop,
            background=self.polarity,
            threshold=self.threshold,
            min_area=self.min_area,
        )


class SessionStore:
    """In-memory sessions with lazy idle eviction."""

    def __init__(self, timeout_s: float):
        self.timeout_s = timeout_s
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _sweep(self, now: float) -> None:
        dead = [sid for sid, s in self._sessions.items()
                if now - s.last_access > self.timeout_s]
        for sid in dead:
            del self._sessions[sid]

    def add(self, session: Session) -> None:
        now = time.monotonic()
        session.last_access = now
        with self._lock:
            self._sweep(now)
            self._sessions[session.id] = session

    def get(self, sid: str) -> Session:
        now = time.monotonic()
        with self._lock:
            self._sweep(now)
            session = self._sessions.get(sid)
            if session is None:
                raise ApiError(404, "UnknownSession", f"no session {sid}")
            session.last_access = now
            return session

    def remove(self, sid: str) -> None:
        with self._lock:
            if sid not in self._sessions:
                raise ApiError(404, "UnknownSession", f"no session {sid}")
            del self._sessions[sid]


class CropModel(BaseModel):
    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(ge=1)
    h: int = Field(ge=1)


class PreviewRequest(BaseModel):
    crop: Optional[CropModel] = None
    polarity: Literal["white", "black"]
    threshold: int = Field(ge=0, le=255)
    min_area: int = Field(ge=0)
    persist: bool = False


class CalibrationRequest(BaseModel):
    dpi: Optional[float] = None
    p1: Optional[Tuple[float, float]] = None
    p2: Optional[Tuple[float, float]] = None
    real_length_mm: Optional[float] = None


def _extract_upload(content_type: str, body: bytes) -> bytes:
    """Pull the image bytes out of a multipart/form-data body.

    A non-multipart body is taken as the raw image, which keeps plain
    curl --data-binary uploads working.
    """
    if not content_type.lower().startswith("multipart/"):
        if not body:
            raise ApiError(400, "MissingUpload", "request body is empty")
        return body
    header = f"Content-Type: {content_type}\r\n\r\n".encode()
    msg = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(header + body)
    if not msg.is_multipart():
        raise ApiError(400, "MissingUpload", "could not parse multipart body")
    for part in msg.iter_parts():
        payload = part.get_payload(decode=True)
        if payload:
            return payload
    raise ApiError(400, "MissingUpload", "multipart body contains no file part")


def _multipart_preview_response(png: bytes, counts_json: bytes) -> Response:
    b = PREVIEW_BOUNDARY.encode()
    chunks = [
        b"--" + b + b"\r\n",
        b"Content-Type: image/png\r\n",
        b'Content-Disposition: inline; name="overlay"; filename="overlay.png"\r\n',
        b"\r\n",
        png,
        b"\r\n--" + b + b"\r\n",
        b"Content-Type: application/json\r\n",
        b'Content-Disposition: inline; name="counts"\r\n',
        b"\r\n",
        counts_json,
        b"\r\n--" + b + b"--\r\n",
    ]
    return Response(
        content=b"".join(chunks),
        media_type=f"multipart/mixed; boundary={PREVIEW_BOUNDARY}",
    )


_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>leafmetric</title></head>
<body><h1>leafmetric service</h1>
<p>The web UI bundle is not built. The JSON API is live under /api/v1.</p>
</body></html>
"""


def create_app(ui_dir: Optional[str] = None, session_timeout_s: float = 1800.0) -> FastAPI:
    app = FastAPI(title="leafmetric", docs_url=None, redoc_url=None)
    store = SessionStore(session_timeout_s)
    app.state.sessions = store

    @app.exception_handler(ApiError)
    async def handle_api_error(_req, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.exception_handler(LeafMetricError)
    async def handle_domain_error(_req, exc: LeafMetricError):
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        return JSONResponse(status_code=status,
                            content={"code": type(exc).__name__, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_req, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "ValidationError", "message": str(exc.errors())})

    @app.post(API_PREFIX + "/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        data = _extract_upload(request.headers.get("content-type", ""), body)
        img = decode_image(data)
        session = Session(id=uuid.uuid4().hex, image=img, png=encode_png(img))
        store.add(session)
        return {"id": session.id, "width": img.width, "height": img.height}

    @app.get(API_PREFIX + "/sessions/{sid}/image")
    def get_image(sid: str):
        session = store.get(sid)
        return Response(content=session.png, media_type="image/png")

    @app.post(API_PREFIX + "/sessions/{sid}/preview")
    def preview(sid: str, req: PreviewRequest):
        session = store.get(sid)
        crop = CropRect(req.crop.x, req.crop.y, req.crop.w, req.crop.h) if req.crop else None
        params = SegmentationParams(
            crop=crop,
            background=BackgroundPolarity(req.polarity),
            threshold=req.threshold,
            min_area=req.min_area,
        )
        view, mask, components = build_mask(session.image, params)
        if req.persist:
            with session.lock:
                session.crop = crop
                session.polarity = params.background
                session.threshold = req.threshold
                session.min_area = req.min_area
        overlay = render_overlay(view, mask, OVERLAY_TINT)
        counts = {"area_px": int(mask.bits.sum()), "component_count": components.count}
        return _multipart_preview_response(encode_png(overlay),
                                           json.dumps(counts).encode())

    @app.post(API_PREFIX + "/sessions/{sid}/calibration")
    def calibrate(sid: str, req: CalibrationRequest):
        session = store.get(sid)
        if req.dpi is not None:
            if req.p1 is not None or req.p2 is not None or req.real_length_mm is not None:
                raise ApiError(422, "AmbiguousCalibration",
                               "give either dpi or a two-point reference, not both")
            if req.dpi <= 0:
                raise ApiError(422, "ValidationError", "dpi must be positive")
            cal = Calibration(req.dpi, CalibrationSource.DECLARED)
        else:
            if req.p1 is None or req.p2 is None or req.real_length_mm is None:
                raise ApiError(422, "ValidationError",
                               "two-point calibration needs p1, p2 and real_length_mm")
            cal = dpi_from_reference(
                ReferenceMeasurement(tuple(req.p1), tuple(req.p2), req.real_length_mm)
            )
        with session.lock:
            session.calibration = cal
        return {"dpi": cal.dpi, "source": cal.source.value}

    @app.post(API_PREFIX + "/sessions/{sid}/measure")
    def measure(sid: str):
        session = store.get(sid)
        if session.calibration is None:
            raise CalibrationMissing("calibrate the session before measuring")
        metrics, warnings, *_ = measure_image(session.image, session.params(),
                                              session.calibration)
        return {"metrics": metrics.as_dict(), "warnings": warnings}

    @app.delete(API_PREFIX + "/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        store.remove(sid)
        return Response(status_code=204)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="webui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _PLACEHOLDER_PAGE

    return app
