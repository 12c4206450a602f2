"""Image, label-map, and manifest io.

Grayscale images are numpy uint8 arrays of shape (height, width) read from
binary PGM (P5, maxval 255) or 8-bit grayscale PNG. Label maps are P5 PGM
files whose pixel values are tissue codes 0-4. A dataset manifest is a JSON
document ``{"root": str, "entries": [{"id", "image", "label"}, ...]}`` with
entry paths resolved against ``root`` (itself resolved against the manifest's
directory when relative).

All writers go through :func:`write_atomic` (temp file + rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    CorruptHeader,
    DuplicateId,
    EmptyDataset,
    MissingFile,
    OutOfRangeLabel,
    UnsupportedFormat,
)
from .tissue import Tissue


def write_atomic(path: str | os.PathLike, data: bytes) -> None:
    """Write ``data`` to ``path`` via a temp file in the same directory + rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require_file(path: Path) -> None:
    if not path.is_file():
        raise MissingFile(f"no such file: {path}")


def _read_pgm(data: bytes, path: Path) -> np.ndarray:
    # Header: "P5" <width> <height> <maxval>, tokens separated by whitespace,
    # "#" comments allowed, then a single whitespace byte before pixel data.
    pos = 2  # past magic
    tokens = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptHeader(f"truncated PGM header: {path}")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptHeader(f"non-numeric PGM header field: {path}") from None
    if width <= 0 or height <= 0:
        raise CorruptHeader(f"bad PGM dimensions {width}x{height}: {path}")
    if maxval > 255:
        raise UnsupportedFormat(f"16-bit PGM not supported (maxval {maxval}): {path}")
    if maxval <= 0:
        raise CorruptHeader(f"bad PGM maxval {maxval}: {path}")
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise CorruptHeader(f"truncated PGM pixel data: {path}")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width).copy()


def _read_png(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise UnsupportedFormat(
                    f"PNG must be 8-bit grayscale, got mode {img.mode!r}: {path}"
                )
            return np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError:
        raise CorruptHeader(f"not a decodable PNG: {path}") from None


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Load a grayscale image (PGM P5 or 8-bit grayscale PNG) as uint8 (h, w)."""
    path = Path(path)
    _require_file(path)
    data = path.read_bytes()
    if data[:2] == b"P5":
        return _read_pgm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    if data[:2] in (b"P2", b"P4", b"P6"):
        raise UnsupportedFormat(f"only binary P5 PGM is supported: {path}")
    raise UnsupportedFormat(f"unrecognized image format: {path}")


def save_image(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write a uint8 grayscale image as PGM (``.pgm``) or PNG (``.png``)."""
    image = _check_u8(image, "image")
    path = Path(path)
    if path.suffix.lower() == ".png":
        import io as _io

        buf = _io.BytesIO()
        Image.fromarray(image, mode="L").save(buf, format="PNG")
        write_atomic(path, buf.getvalue())
    else:
        write_atomic(path, _pgm_bytes(image))


def _pgm_bytes(arr: np.ndarray) -> bytes:
    h, w = arr.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + arr.tobytes()


def _check_u8(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise UnsupportedFormat(f"{what} must be a 2-D uint8 array")
    return arr


def load_label_map(path: str | os.PathLike) -> np.ndarray:
    """Load a tissue label map (P5 PGM, values 0-4) as uint8 (h, w)."""
    path = Path(path)
    _require_file(path)
    data = path.read_bytes()
    if data[:2] != b"P5":
        raise UnsupportedFormat(f"label maps must be binary P5 PGM: {path}")
    labels = _read_pgm(data, path)
    high = int(labels.max()) if labels.size else 0
    if high > int(max(Tissue)):
        raise OutOfRangeLabel(f"label value {high} out of range 0-4: {path}")
    return labels


def save_label_map(path: str | os.PathLike, labels: np.ndarray) -> None:
    """Write a tissue label map as canonical P5 PGM (maxval 255, no comments)."""
    labels = _check_u8(labels, "label map")
    if labels.size and int(labels.max()) > int(max(Tissue)):
        raise OutOfRangeLabel(f"label value {int(labels.max())} out of range 0-4")
    write_atomic(path, _pgm_bytes(labels))


@dataclass
class DatasetEntry:
    id: str
    image_path: Path
    label_path: Path


@dataclass
class Manifest:
    root: Path
    entries: list[DatasetEntry]

    def __len__(self) -> int:
        return len(self.entries)


def load_manifest(path: str | os.PathLike) -> Manifest:
    """Load and validate a dataset manifest; paths are resolved but not opened."""
    path = Path(path)
    _require_file(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptHeader(f"manifest is not valid JSON: {path} ({exc})") from None
    if not isinstance(doc, dict) or "entries" not in doc:
        raise CorruptHeader(f"manifest missing 'entries': {path}")
    root = Path(doc.get("root", "."))
    if not root.is_absolute():
        root = path.parent / root
    raw = doc["entries"]
    if not isinstance(raw, list) or not raw:
        raise EmptyDataset(f"manifest has no entries: {path}")
    entries = []
    seen = set()
    for item in raw:
        try:
            entry_id = item["id"]
            image_rel = item["image"]
            label_rel = item["label"]
        except (TypeError, KeyError):
            raise CorruptHeader(f"manifest entry missing id/image/label: {path}") from None
        if entry_id in seen:
            raise DuplicateId(f"duplicate manifest id {entry_id!r}: {path}")
        seen.add(entry_id)
        entries.append(DatasetEntry(entry_id, root / image_rel, root / label_rel))
    return Manifest(root=root, entries=entries)


def save_manifest(path: str | os.PathLike, entries: list[dict], root: str = ".",
                  extra: dict | None = None) -> None:
    """Write a manifest JSON with deterministic formatting."""
    doc = {"root": root, "entries": entries}
    if extra:
        doc.update(extra)
    write_atomic(path, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())


@dataclass
class LoadedImagePair:
    id: str
    image: np.ndarray
    labels: np.ndarray


def load_dataset(manifest: Manifest) -> list[LoadedImagePair]:
    """Load every image/label pair in the manifest, validating dimensions."""
    from .errors import DimensionMismatch

    pairs = []
    for entry in manifest.entries:
        image = load_image(entry.image_path)
        labels = load_label_map(entry.label_path)
        if image.shape != labels.shape:
            raise DimensionMismatch(
                f"image {image.shape} vs label map {labels.shape} for id {entry.id!r}"
            )
        pairs.append(LoadedImagePair(entry.id, image, labels))
    return pairs
