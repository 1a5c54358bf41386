"""File formats: PNG images, labeled-dataset CSV, and small write helpers."""

import csv
import io
import os

import numpy as np
from PIL import Image

from .errors import InvalidInputError
from .features import FEATURE_NAMES
from .network import LabeledDataset

DATASET_HEADER = ["image_id", "line_id"] + FEATURE_NAMES + ["target"]


def read_gray_image(path):
    """Load a PNG/JPEG as a 2-D uint8 grayscale array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def write_image(path, array):
    arr = np.asarray(array, dtype=np.uint8)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    Image.fromarray(arr, mode="L").save(path)


def dataset_to_csv(data, stream=None):
    """Labeled dataset rows in the export format (features plus target)."""
    out = stream or io.StringIO()
    writer = csv.writer(out)
    writer.writerow(DATASET_HEADER)
    for img, lid, row, target in zip(data.image_ids, data.line_ids, data.X, data.y):
        writer.writerow([img, int(lid)] + [f"{v:.6f}" for v in row] + [int(target)])
    return out.getvalue() if stream is None else None


def dataset_from_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != DATASET_HEADER:
        raise InvalidInputError("dataset CSV header does not match the documented format")
    image_ids, line_ids, X, y = [], [], [], []
    for row in rows[1:]:
        if not row:
            continue
        image_ids.append(row[0])
        line_ids.append(int(row[1]))
        X.append([float(v) for v in row[2:-1]])
        y.append(float(row[-1]))
    return LabeledDataset(
        X=np.array(X, dtype=np.float64).reshape(-1, len(FEATURE_NAMES)),
        y=np.array(y, dtype=np.float64),
        image_ids=image_ids,
        line_ids=line_ids,
    )


def write_text(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_text(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()
