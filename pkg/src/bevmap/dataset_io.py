"""Line-delimited dataset files.

A dataset file starts with a one-line header object carrying the frame
dimensions of both views, followed by one JSON object per record:

    {"frontal_dims": [1920.0, 1080.0], "birdeye_dims": [1920.0, 1080.0]}
    {"frame_id": "...", "entity_id": 0, "model_id": 101, "class_label": "car",
     "frontal_box": [x_min, y_min, x_max, y_max], "birdeye_box": [...],
     "distance_m": 12.5, "yaw_deg": 3.1}

Box coordinates are pixel-space in the declared frame dimensions.
Prediction files use the same layout with an extra per-record
``predicted_birdeye_box`` field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .boxes import BIRDEYE, FRONTAL, BBox, DetectionRecord, FrameDims

RECORD_FIELDS = ("frame_id", "entity_id", "model_id", "class_label",
                 "frontal_box", "birdeye_box", "distance_m", "yaw_deg")


class DataFormatError(ValueError):
    """A dataset file or line does not match the documented schema."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass
class DatasetHeader:
    frontal_dims: FrameDims = field(default_factory=FrameDims)
    birdeye_dims: FrameDims = field(default_factory=FrameDims)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        obj = {"frontal_dims": [self.frontal_dims.width, self.frontal_dims.height],
               "birdeye_dims": [self.birdeye_dims.width, self.birdeye_dims.height]}
        obj.update(self.extra)
        return json.dumps(obj)


def _parse_header(line: str) -> DatasetHeader:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"header is not valid JSON: {e}", line_no=1)
    if not isinstance(obj, dict) or "frontal_dims" not in obj or "birdeye_dims" not in obj:
        raise DataFormatError("header must carry frontal_dims and birdeye_dims", line_no=1)
    fw, fh = obj.pop("frontal_dims")
    bw, bh = obj.pop("birdeye_dims")
    return DatasetHeader(FrameDims(fw, fh), FrameDims(bw, bh), extra=obj)


def record_to_obj(r: DetectionRecord) -> dict:
    return {
        "frame_id": r.frame_id,
        "entity_id": r.entity_id,
        "model_id": r.model_id,
        "class_label": r.class_label,
        "frontal_box": list(r.frontal_box.as_tuple()),
        "birdeye_box": list(r.birdeye_box.as_tuple()),
        "distance_m": r.distance_m,
        "yaw_deg": r.yaw_deg,
    }


def record_from_obj(obj: dict, line_no: int | None = None) -> DetectionRecord:
    if not isinstance(obj, dict):
        raise DataFormatError("record line must be a JSON object", line_no)
    missing = [k for k in RECORD_FIELDS if k not in obj]
    if missing:
        raise DataFormatError(f"record missing fields {missing}", line_no)
    try:
        fb = obj["frontal_box"]
        bb = obj["birdeye_box"]
        return DetectionRecord(
            frame_id=str(obj["frame_id"]),
            entity_id=int(obj["entity_id"]),
            model_id=int(obj["model_id"]),
            class_label=str(obj["class_label"]),
            frontal_box=BBox(*map(float, fb), view=FRONTAL),
            birdeye_box=BBox(*map(float, bb), view=BIRDEYE),
            distance_m=float(obj["distance_m"]),
            yaw_deg=float(obj["yaw_deg"]),
        )
    except (TypeError, ValueError) as e:
        raise DataFormatError(f"bad record: {e}", line_no)


def write_dataset(path: str | Path, header: DatasetHeader,
                  records: Iterable[DetectionRecord]) -> int:
    """Write header + records; returns the number of records written."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        f.write(header.to_json() + "\n")
        for r in records:
            f.write(json.dumps(record_to_obj(r)) + "\n")
            n += 1
    return n


def read_header(path: str | Path) -> DatasetHeader:
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
    if not first.strip():
        raise DataFormatError("empty dataset file", line_no=1)
    return _parse_header(first)


def iter_dataset(path: str | Path, on_error: str = "raise",
                 errors: list | None = None) -> Iterator[DetectionRecord]:
    """Yield records from a dataset file.

    ``on_error``: "raise" aborts on the first malformed line; "collect"
    skips the line and appends the DataFormatError to ``errors``.
    """
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
        if not first.strip():
            raise DataFormatError("empty dataset file", line_no=1)
        _parse_header(first)
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                yield record_from_obj(obj, line_no)
            except (json.JSONDecodeError, DataFormatError) as e:
                err = e if isinstance(e, DataFormatError) else \
                    DataFormatError(f"not valid JSON: {e}", line_no)
                if on_error == "collect" and errors is not None:
                    errors.append(err)
                    continue
                raise err from None


def read_dataset(path: str | Path) -> tuple[DatasetHeader, list[DetectionRecord]]:
    return read_header(path), list(iter_dataset(path))


def write_predictions(path: str | Path, header: DatasetHeader, model_name: str,
                      pairs: Iterable[tuple[DetectionRecord, BBox]]) -> int:
    """Dataset layout plus a per-record ``predicted_birdeye_box`` field."""
    h = DatasetHeader(header.frontal_dims, header.birdeye_dims,
                      extra={"model": model_name})
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        f.write(h.to_json() + "\n")
        for r, pred in pairs:
            obj = record_to_obj(r)
            obj["predicted_birdeye_box"] = list(pred.as_tuple())
            f.write(json.dumps(obj) + "\n")
            n += 1
    return n


def read_predictions(path: str | Path) -> tuple[DatasetHeader, list[tuple[DetectionRecord, BBox]]]:
    header = read_header(path)
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        f.readline()
        for line_no, line in enumerate(f, start=2):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"not valid JSON: {e}", line_no)
            rec = record_from_obj(obj, line_no)
            if "predicted_birdeye_box" not in obj:
                raise DataFormatError("record missing predicted_birdeye_box", line_no)
            pred = BBox(*map(float, obj["predicted_birdeye_box"]), view=BIRDEYE)
            pairs.append((rec, pred))
    return header, pairs
