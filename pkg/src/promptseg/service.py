"""HTTP inference service.

Stateless request handling over a shared immutable model. The probability
map travels as a 16-bit grayscale PNG so clients can re-threshold without
another request; the returned mask is computed from the same quantized
values, making client-side thresholding bit-identical to the server's.
"""

import base64
import json
import logging
import threading
import time

import cv2
import numpy as np
from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse

from .conditioning import condition_from_text, condition_from_visual, interpolate
from .decoder import segment_logits
from .errors import PromptSegError
from .visual_prompts import registered_strategy_ids

log = logging.getLogger(__name__)

PROB_SCALE = 65535  # 16-bit quantization: error < 1/65535


def setup_json_logging(level=logging.INFO):
    class JsonFormatter(logging.Formatter):
        def format(self, record):
            return json.dumps(
                {
                    "ts": self.formatTime(record),
                    "level": record.levelname,
                    "logger": record.name,
                    "msg": record.getMessage(),
                }
            )

    handler = logging.StreamHandler()
    handler.setFormatter(JsonFormatter())
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(level)


def _decode_upload(data):
    arr = np.frombuffer(data, dtype=np.uint8)
    bgr = cv2.imdecode(arr, cv2.IMREAD_COLOR)
    if bgr is None:
        return None
    return cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)


def _decode_mask_upload(data):
    arr = np.frombuffer(data, dtype=np.uint8)
    m = cv2.imdecode(arr, cv2.IMREAD_GRAYSCALE)
    if m is None:
        return None
    return m > 127


def _png_b64(array):
    ok, buf = cv2.imencode(".png", array)
    if not ok:
        raise PromptSegError("PNG encoding failed")
    return base64.b64encode(buf.tobytes()).decode("ascii")


def create_app(model, max_pixels=2048 * 2048, workers=4, queue_slots=8, default_threshold=0.5):
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="promptseg")
    # the browser workbench is served from its own origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    # bounded pool + queue: immediate 503 when every slot is taken
    limiter = threading.BoundedSemaphore(max(1, workers + queue_slots))
    app.state.limiter = limiter
    app.state.model = model

    def error(status, detail):
        return JSONResponse(status_code=status, content={"detail": detail})

    @app.get("/health")
    def health():
        return {"status": "ok", "model_hash": model.model_hash}

    @app.get("/recipes")
    def recipes():
        return {"recipes": registered_strategy_ids()}

    @app.post("/segment")
    def segment(
        image: UploadFile | None = File(default=None),
        text: str | None = Form(default=None),
        support_image: UploadFile | None = File(default=None),
        support_mask: UploadFile | None = File(default=None),
        recipe: str = Form(default="best"),
        threshold: float | None = Form(default=None),
        a: float | None = Form(default=None),
    ):
        if not limiter.acquire(blocking=False):
            return error(503, "server at capacity, retry later")
        try:
            t0 = time.perf_counter()
            if image is None:
                return error(400, {"field": "image", "problem": "query image file missing"})
            query = _decode_upload(image.file.read())
            if query is None:
                return error(400, {"field": "image", "problem": "undecodable image payload"})
            if query.shape[0] * query.shape[1] > max_pixels:
                return error(413, f"image exceeds the {max_pixels}-pixel limit")

            has_text = text is not None and text.strip() != ""
            has_support = support_image is not None and support_mask is not None
            if not has_text and not has_support:
                return error(
                    422,
                    "prompt missing: provide `text` or `support_image`+`support_mask`",
                )

            try:
                cond = None
                if has_support:
                    simg = _decode_upload(support_image.file.read())
                    smask = _decode_mask_upload(support_mask.file.read())
                    if simg is None or smask is None:
                        return error(
                            400,
                            {"field": "support", "problem": "undecodable support payload"},
                        )
                    cond = condition_from_visual(
                        model.backbone, simg, smask, recipe,
                        crop_output_size=model.backbone.config.native_image_size,
                    )
                if has_text:
                    text_cond = condition_from_text(model.backbone, text)
                    if cond is None:
                        cond = text_cond
                    else:
                        cond = interpolate(cond, text_cond, 0.5 if a is None else a)

                t = default_threshold if threshold is None else float(threshold)
                logits = segment_logits(model.decoder, model.readout(query), cond)
            except PromptSegError as exc:
                return error(400, str(exc))

            probs = logits.probabilities()
            quantized = np.rint(probs * PROB_SCALE).astype(np.uint16)
            # threshold the quantized values: client-side re-thresholding of
            # the returned 16-bit map reproduces this mask bit for bit
            mask = (quantized.astype(np.float64) / PROB_SCALE) >= t
            latency_ms = (time.perf_counter() - t0) * 1000.0
            return {
                "mask_png_base64": _png_b64(mask.astype(np.uint8) * 255),
                "prob_map_png_base64": _png_b64(quantized),
                "threshold": t,
                "latency_ms": latency_ms,
            }
        finally:
            limiter.release()

    return app


def serve(checkpoint, host="127.0.0.1", port=8000, backbone_weights=None):
    """Load the checkpoint and run the service (blocking)."""
    import uvicorn

    from .pipeline import load_model

    setup_json_logging()
    model, payload = load_model(checkpoint, backbone_weights=backbone_weights)
    log.info("model loaded: hash=%s", model.model_hash)
    app = create_app(model)
    uvicorn.run(app, host=host, port=port, log_level="info")
