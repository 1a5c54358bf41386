"""Region-based fracture labeling with per-line deselection.

A drawn rectangle marks every line with a start or end point inside it as
fractured; remaining lines default to non-fractured.  Deselection flips a
single line back, and re-applying a region wins over an earlier deselection.
All mutations append to an event log so the store can be reconstructed by
replay, and exports read a consistent snapshot under the store lock.
"""

import csv
import io
import json
import threading
import warnings
from dataclasses import dataclass, asdict
from datetime import datetime, timezone

import numpy as np

from .errors import InvalidInputError, NotFoundError
from .features import FEATURE_NAMES
from .validation import check_segments

FRACTURE = "fracture"
NON_FRACTURE = "non-fracture"


@dataclass
class RegionSelection:
    """A fracture rectangle drawn over one image, in pixel coordinates."""

    image_id: str
    x: int
    y: int
    width: int
    height: int
    author: str = ""
    timestamp: str = ""

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidInputError("selection rectangle must have positive size")
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    def contains(self, px, py):
        return (self.x <= px <= self.x + self.width
                and self.y <= py <= self.y + self.height)


@dataclass
class LabelRecord:
    image_id: str
    line_id: int
    label: str
    source: str


def apply_region(lines, sel, image_size=None):
    """Label every line against one rectangle: fracture iff an endpoint is
    inside (edges inclusive), non-fracture (source `default`) otherwise."""
    segs = check_segments(lines)
    if image_size is not None:
        w, h = image_size
        if sel.x < 0 or sel.y < 0 or sel.x + sel.width > w or sel.y + sel.height > h:
            raise InvalidInputError("selection rectangle exceeds the image bounds")
    records = []
    for line_id, (x1, y1, x2, y2) in enumerate(segs):
        hit = sel.contains(int(x1), int(y1)) or sel.contains(int(x2), int(y2))
        records.append(LabelRecord(image_id=sel.image_id, line_id=line_id,
                                   label=FRACTURE if hit else NON_FRACTURE,
                                   source="region" if hit else "default"))
    return records


class LabelStore:
    """Thread-safe label state for a set of images with detected lines.

    Images are registered with their line sets (and optionally feature rows
    for export).  Labeling events go through `apply_region_event` and
    `deselect_event`, are appended to the in-memory event list and, when a
    log path is configured, to a JSON-lines file.
    """

    def __init__(self, log_path=None):
        self._images = {}
        self._records = {}
        self._events = []
        self._lock = threading.Lock()
        self._log_path = log_path

    def add_image(self, image_id, lines, size, features=None):
        segs = check_segments(lines)
        with self._lock:
            self._images[image_id] = {
                "lines": segs,
                "size": tuple(size),
                "features": None if features is None else np.asarray(features, dtype=np.float64),
            }

    def image_ids(self):
        with self._lock:
            return sorted(self._images)

    def image(self, image_id):
        with self._lock:
            if image_id not in self._images:
                raise NotFoundError(image_id)
            return self._images[image_id]

    def _ensure_records(self, image_id):
        if image_id not in self._records:
            self._records[image_id] = {
                line_id: LabelRecord(image_id, line_id, NON_FRACTURE, "default")
                for line_id in range(len(self._images[image_id]["lines"]))
            }

    def _append_event(self, event):
        self._events.append(event)
        if self._log_path:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event) + "\n")

    def apply_region_event(self, sel, log=True):
        """Merge one rectangle into the store: covered lines become fractures,
        uncovered lines keep whatever label they already have."""
        with self._lock:
            if sel.image_id not in self._images:
                raise NotFoundError(sel.image_id)
            img = self._images[sel.image_id]
            fresh = apply_region(img["lines"], sel, img["size"])
            self._ensure_records(sel.image_id)
            records = self._records[sel.image_id]
            for rec in fresh:
                if rec.label == FRACTURE:
                    records[rec.line_id] = rec
            if log:
                self._append_event({"type": "region", **asdict(sel)})
            return dict(records)

    def deselect_event(self, image_id, line_id, log=True):
        """Flip one line back to non-fracture; idempotent."""
        with self._lock:
            if image_id not in self._images:
                raise NotFoundError(image_id)
            if not 0 <= line_id < len(self._images[image_id]["lines"]):
                raise NotFoundError(f"line {line_id} of image {image_id}")
            self._ensure_records(image_id)
            records = self._records[image_id]
            if records[line_id].label == FRACTURE:
                records[line_id] = LabelRecord(image_id, line_id, NON_FRACTURE, "deselection")
            if log:
                self._append_event({"type": "deselect", "image_id": image_id,
                                    "line_id": int(line_id)})
            return dict(records)

    def labels_for(self, image_id):
        with self._lock:
            if image_id not in self._images:
                raise NotFoundError(image_id)
            self._ensure_records(image_id)
            return {lid: rec.label for lid, rec in self._records[image_id].items()}

    def events(self):
        with self._lock:
            return list(self._events)

    def replay(self, events):
        """Apply a recorded event sequence (e.g. a parsed log file)."""
        for event in events:
            kind = event["type"]
            if kind == "region":
                fields = {k: v for k, v in event.items() if k != "type"}
                self.apply_region_event(RegionSelection(**fields), log=False)
            elif kind == "deselect":
                self.deselect_event(event["image_id"], int(event["line_id"]), log=False)
            else:
                raise InvalidInputError(f"unknown event type {kind!r}")

    def export_rows(self):
        """Snapshot of all labeled rows: (image_id, line_id, features, target)."""
        with self._lock:
            rows = []
            for image_id in sorted(self._records):
                img = self._images[image_id]
                feats = img["features"]
                for line_id in sorted(self._records[image_id]):
                    rec = self._records[image_id][line_id]
                    target = 1 if rec.label == FRACTURE else -1
                    row_feats = None if feats is None else feats[line_id]
                    rows.append((image_id, line_id, row_feats, target))
            return rows


def export_dataset(store):
    """Feature CSV joined with labels; targets are +1 fracture / -1 otherwise.

    Images without feature rows contribute empty feature cells.  An entirely
    unlabeled store produces just the header, with a warning.
    """
    rows = store.export_rows()
    if not rows:
        warnings.warn("no labeled images; export is empty", stacklevel=2)
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["image_id", "line_id"] + FEATURE_NAMES + ["target"])
    for image_id, line_id, feats, target in rows:
        cells = ["" for _ in FEATURE_NAMES] if feats is None else [f"{v:.6f}" for v in feats]
        writer.writerow([image_id, line_id] + cells + [target])
    return out.getvalue()


def load_events(path):
    """Parse a JSON-lines event log."""
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    return events
