"""Path-based sample records and their JSON-lines index format."""

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import cv2
import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class SampleRecord:
    """One (image, phrase, mask) row, optionally with a visual support pair.

    Negative records keep their mask path for provenance but always load
    as an all-zero target.
    """

    image: str
    phrase: str
    mask: str
    support_image: str | None = None
    support_mask: str | None = None
    negative: bool = False

    def __post_init__(self):
        if not self.phrase:
            raise InputError("record phrase must be non-empty")

    def with_support(self, other):
        return replace(self, support_image=other.image, support_mask=other.mask)

    def as_negative(self, phrase):
        return replace(
            self, phrase=phrase, negative=True, support_image=None, support_mask=None
        )


@dataclass
class LoadedSample:
    image: np.ndarray  # H x W x 3 uint8
    phrase: str
    mask: np.ndarray  # H x W bool; all-zero for negatives
    support_image: np.ndarray | None = None
    support_mask: np.ndarray | None = None
    negative: bool = False


def write_records(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec)) + "\n")
    return path


def read_records(path):
    records = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(SampleRecord(**json.loads(line)))
    return records


def _read_image(path):
    bgr = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if bgr is None:
        raise InputError(f"cannot read image {path}")
    return cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)


def _read_mask(path):
    m = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if m is None:
        raise InputError(f"cannot read mask {path}")
    return m > 127


def load_sample(record, root="."):
    """Materialize a record; enforces the all-zero-mask negative invariant."""
    root = Path(root)
    image = _read_image(root / record.image)
    if record.negative:
        mask = np.zeros(image.shape[:2], dtype=bool)
    else:
        mask = _read_mask(root / record.mask)
    support_image = support_mask = None
    if record.support_image is not None:
        support_image = _read_image(root / record.support_image)
        support_mask = _read_mask(root / record.support_mask)
    return LoadedSample(
        image=image,
        phrase=record.phrase,
        mask=mask,
        support_image=support_image,
        support_mask=support_mask,
        negative=record.negative,
    )
