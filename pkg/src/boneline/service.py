"""HTTP+JSON labeling service.

Serves images, their detected lines and current labels, accepts rectangle
selections and per-line deselections, and exports the labeled dataset as
CSV.  Expects a data directory laid out as written by the CLI stages:

    <data_dir>/images/<id>.png        enhanced grayscale images
    <data_dir>/lines/<id>.json        detected lines (JSON array of 4-tuples)
    <data_dir>/features/<id>.csv      per-image feature rows (optional)
    <data_dir>/labels.jsonl           append-only labeling event log

Static UI assets are served from <data_dir>/ui when present.
"""

import os

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, PlainTextResponse, Response
from pydantic import BaseModel

from .errors import InvalidInputError, NotFoundError
from .features import features_from_csv
from .hough import segments_from_json, segments_to_json
from .labeling import LabelStore, RegionSelection, export_dataset, load_events


class RegionRequest(BaseModel):
    x: int
    y: int
    width: int
    height: int
    author: str = ""


class DeselectRequest(BaseModel):
    line_id: int


def load_store(data_dir):
    """Build a LabelStore from a data directory and replay its event log."""
    from PIL import Image

    store = LabelStore(log_path=os.path.join(data_dir, "labels.jsonl"))
    images_dir = os.path.join(data_dir, "images")
    lines_dir = os.path.join(data_dir, "lines")
    features_dir = os.path.join(data_dir, "features")
    if not os.path.isdir(images_dir):
        raise InvalidInputError(f"no images directory under {data_dir}")
    for name in sorted(os.listdir(images_dir)):
        stem, ext = os.path.splitext(name)
        if ext.lower() not in (".png", ".jpg", ".jpeg"):
            continue
        with Image.open(os.path.join(images_dir, name)) as img:
            size = img.size
        lines_path = os.path.join(lines_dir, stem + ".json")
        if not os.path.exists(lines_path):
            continue
        with open(lines_path, encoding="utf-8") as fh:
            lines = segments_from_json(fh.read())
        features = None
        feat_path = os.path.join(features_dir, stem + ".csv")
        if os.path.exists(feat_path):
            with open(feat_path, encoding="utf-8") as fh:
                _, _, features = features_from_csv(fh.read())
        store.add_image(stem, lines, size, features)
    log_path = os.path.join(data_dir, "labels.jsonl")
    if os.path.exists(log_path):
        store.replay(load_events(log_path))
    return store


def create_app(data_dir, store=None):
    store = store if store is not None else load_store(data_dir)
    app = FastAPI(title="boneline labeling service")
    app.state.store = store
    app.state.data_dir = data_dir

    def _image_or_404(image_id):
        try:
            return store.image(image_id)
        except NotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown image {image_id}")

    @app.get("/images")
    def list_images():
        out = []
        for image_id in store.image_ids():
            img = store.image(image_id)
            w, h = img["size"]
            out.append({"id": image_id, "width": w, "height": h,
                        "line_count": len(img["lines"])})
        return out

    @app.get("/images/{image_id}/raw")
    def raw_image(image_id: str):
        _image_or_404(image_id)
        for ext in (".png", ".jpg", ".jpeg"):
            path = os.path.join(data_dir, "images", image_id + ext)
            if os.path.exists(path):
                with open(path, "rb") as fh:
                    media = "image/png" if ext == ".png" else "image/jpeg"
                    return Response(content=fh.read(), media_type=media)
        raise HTTPException(status_code=404, detail="image file missing")

    @app.get("/images/{image_id}/lines")
    def image_lines(image_id: str):
        img = _image_or_404(image_id)
        return Response(content=segments_to_json(img["lines"]),
                        media_type="application/json")

    @app.get("/images/{image_id}/labels")
    def image_labels(image_id: str):
        _image_or_404(image_id)
        return {"labels": {str(k): v for k, v in store.labels_for(image_id).items()}}

    @app.post("/images/{image_id}/regions")
    def post_region(image_id: str, body: RegionRequest):
        _image_or_404(image_id)
        sel = RegionSelection(image_id=image_id, x=body.x, y=body.y,
                              width=body.width, height=body.height, author=body.author)
        try:
            records = store.apply_region_event(sel)
        except InvalidInputError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"labels": {str(k): rec.label for k, rec in records.items()}}

    @app.post("/images/{image_id}/deselect")
    def post_deselect(image_id: str, body: DeselectRequest):
        _image_or_404(image_id)
        try:
            records = store.deselect_event(image_id, body.line_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"labels": {str(k): rec.label for k, rec in records.items()}}

    @app.get("/export.csv")
    def export_csv():
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return PlainTextResponse(export_dataset(store), media_type="text/csv")

    @app.get("/", response_class=HTMLResponse)
    def index():
        ui_index = os.path.join(data_dir, "ui", "index.html")
        if os.path.exists(ui_index):
            with open(ui_index, encoding="utf-8") as fh:
                return fh.read()
        return "<html><body><h1>boneline labeling service</h1>" \
               "<p>No UI assets installed; see GET /images.</p></body></html>"

    @app.get("/ui/{path:path}")
    def ui_asset(path: str):
        full = os.path.normpath(os.path.join(data_dir, "ui", path))
        if not full.startswith(os.path.normpath(os.path.join(data_dir, "ui"))):
            raise HTTPException(status_code=404)
        if not os.path.exists(full) or os.path.isdir(full):
            raise HTTPException(status_code=404)
        media = "application/javascript" if full.endswith(".js") else "text/plain"
        if full.endswith(".html"):
            media = "text/html"
        elif full.endswith(".css"):
            media = "text/css"
        with open(full, "rb") as fh:
            return Response(content=fh.read(), media_type=media)

    return app


def serve(data_dir, port=8500, host="127.0.0.1"):
    """Run the labeling service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")
