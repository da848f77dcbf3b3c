"""Raw planar YUV 4:2:0 / depth raster I/O and block tiling.

Files carry no header, so geometry always comes from the caller or from a
sequence manifest (a small JSON document, see :func:`load_manifest`).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadGeometry, DimensionMismatch, MissingFile, TruncatedFrame

MIN_DIMENSION = 64


def _check_geometry(width: int, height: int) -> None:
    if width < MIN_DIMENSION or height < MIN_DIMENSION:
        raise BadGeometry(f"{width}x{height}: both dimensions must be >= {MIN_DIMENSION}")
    if width % 2 or height % 2:
        raise BadGeometry(f"{width}x{height}: dimensions must be even")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint8)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Frame:
    """One picture: full-resolution luma plus quarter-resolution chroma."""

    y: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        h, w = np.shape(self.y)
        _check_geometry(w, h)
        for name in ("u", "v"):
            if np.shape(getattr(self, name)) != (h // 2, w // 2):
                raise BadGeometry(f"{name} plane must be {(h // 2, w // 2)}, got {np.shape(getattr(self, name))}")
        for name in ("y", "u", "v"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def height(self) -> int:
        return self.y.shape[0]

    def to_bytes(self) -> bytes:
        return self.y.tobytes() + self.u.tobytes() + self.v.tobytes()


@dataclass(frozen=True)
class DepthMap:
    d: np.ndarray

    def __post_init__(self):
        h, w = np.shape(self.d)
        _check_geometry(w, h)
        object.__setattr__(self, "d", _frozen(self.d))

    @property
    def width(self) -> int:
        return self.d.shape[1]

    @property
    def height(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class StereoSequence:
    """Left/right views with one depth map per view and per frame."""

    left: tuple
    right: tuple
    depth_left: tuple
    depth_right: tuple

    def __post_init__(self):
        streams = {}
        for name in ("left", "right", "depth_left", "depth_right"):
            s = tuple(getattr(self, name))
            object.__setattr__(self, name, s)
            streams[name] = s
        counts = {len(s) for s in streams.values()}
        if len(counts) != 1 or 0 in counts:
            raise DimensionMismatch(
                "all streams need the same positive frame count, got "
                + ", ".join(f"{k}={len(v)}" for k, v in streams.items())
            )
        shape = self.left[0].y.shape
        for name, s in streams.items():
            for item in s:
                plane = item.y if isinstance(item, Frame) else item.d
                if plane.shape != shape:
                    raise DimensionMismatch(f"{name}: frame of shape {plane.shape}, expected {shape}")

    @property
    def frame_count(self) -> int:
        return len(self.left)

    @property
    def width(self) -> int:
        return self.left[0].width

    @property
    def height(self) -> int:
        return self.left[0].height


@dataclass(frozen=True)
class BlockGrid:
    block_size: int
    cols: int
    rows: int
    blocks: np.ndarray = field(repr=False)  # (rows*cols, b, b), row-major

    @property
    def n(self) -> int:
        return self.cols * self.rows


def _file_bytes(path, frame_bytes: int, max_frames: int | None) -> tuple[bytes, int]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such file: {path}")
    size = path.stat().st_size
    if size == 0 or size % frame_bytes:
        raise TruncatedFrame(f"{path}: {size} bytes is not a positive multiple of {frame_bytes}")
    count = size // frame_bytes
    if max_frames is not None:
        count = min(count, max_frames)
    with open(path, "rb") as f:
        data = f.read(count * frame_bytes)
    return data, count


def read_yuv_sequence(path, width: int, height: int, max_frames: int | None = None) -> list[Frame]:
    """Read an 8-bit planar YUV 4:2:0 file (Y, then U, then V per frame)."""
    _check_geometry(width, height)
    luma = width * height
    chroma = luma // 4
    frame_bytes = luma + 2 * chroma
    data, count = _file_bytes(path, frame_bytes, max_frames)
    buf = np.frombuffer(data, dtype=np.uint8)
    frames = []
    for k in range(count):
        off = k * frame_bytes
        y = buf[off:off + luma].reshape(height, width)
        u = buf[off + luma:off + luma + chroma].reshape(height // 2, width // 2)
        v = buf[off + luma + chroma:off + frame_bytes].reshape(height // 2, width // 2)
        frames.append(Frame(y, u, v))
    return frames


def read_depth_sequence(path, width: int, height: int, max_frames: int | None = None) -> list[DepthMap]:
    """Read a luma-only 8-bit raster file, one width*height chunk per frame."""
    _check_geometry(width, height)
    frame_bytes = width * height
    data, count = _file_bytes(path, frame_bytes, max_frames)
    buf = np.frombuffer(data, dtype=np.uint8)
    return [DepthMap(buf[k * frame_bytes:(k + 1) * frame_bytes].reshape(height, width)) for k in range(count)]


def write_yuv_sequence(path, frames) -> None:
    with open(path, "wb") as f:
        for fr in frames:
            f.write(fr.to_bytes())


def write_depth_sequence(path, depths) -> None:
    with open(path, "wb") as f:
        for dm in depths:
            f.write(dm.d.tobytes())


def tile_plane(plane, block_size: int) -> BlockGrid:
    """Split a plane into row-major block_size tiles, dropping partial borders."""
    plane = np.asarray(plane)
    if plane.ndim != 2:
        raise BadGeometry(f"expected a 2-D plane, got shape {plane.shape}")
    h, w = plane.shape
    if h < block_size or w < block_size:
        raise BadGeometry(f"plane {w}x{h} is smaller than block size {block_size}")
    rows, cols = h // block_size, w // block_size
    cropped = plane[:rows * block_size, :cols * block_size]
    blocks = (
        cropped.reshape(rows, block_size, cols, block_size)
        .swapaxes(1, 2)
        .reshape(rows * cols, block_size, block_size)
        .copy()
    )
    return BlockGrid(block_size, cols, rows, blocks)


def untile(grid: BlockGrid) -> np.ndarray:
    """Reassemble a BlockGrid into the cropped plane it came from."""
    b = grid.block_size
    return grid.blocks.reshape(grid.rows, grid.cols, b, b).swapaxes(1, 2).reshape(grid.rows * b, grid.cols * b)


# -- manifests ---------------------------------------------------------------

MANIFEST_KEYS = ("left", "right", "depth_left", "depth_right", "width", "height", "frame_count")


@dataclass(frozen=True)
class Manifest:
    left: Path
    right: Path
    depth_left: Path
    depth_right: Path
    width: int
    height: int
    frame_count: int

    def to_json(self) -> str:
        d = {k: getattr(self, k) for k in MANIFEST_KEYS}
        for k in ("left", "right", "depth_left", "depth_right"):
            d[k] = str(d[k])
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def load_manifest(path) -> Manifest:
    """Parse a sequence manifest; relative stream paths resolve against its directory.

    Raises MissingFile if the manifest itself is absent and BadGeometry for a
    malformed document or invalid geometry. Stream files are not opened here.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such manifest: {path}")
    try:
        doc = json.loads(path.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BadGeometry(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise BadGeometry(f"{path}: manifest must be a JSON object")
    missing = [k for k in MANIFEST_KEYS if k not in doc]
    if missing:
        raise BadGeometry(f"{path}: missing keys {missing}")
    try:
        width, height, count = int(doc["width"]), int(doc["height"]), int(doc["frame_count"])
    except (TypeError, ValueError) as exc:
        raise BadGeometry(f"{path}: width/height/frame_count must be integers") from exc
    _check_geometry(width, height)
    if count < 1:
        raise BadGeometry(f"{path}: frame_count must be positive")
    base = path.parent
    streams = {k: base / os.fspath(doc[k]) for k in ("left", "right", "depth_left", "depth_right")}
    return Manifest(width=width, height=height, frame_count=count, **streams)


def read_stereo_sequence(manifest: Manifest | str | os.PathLike) -> StereoSequence:
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    m = manifest
    left = read_yuv_sequence(m.left, m.width, m.height, m.frame_count)
    right = read_yuv_sequence(m.right, m.width, m.height, m.frame_count)
    dl = read_depth_sequence(m.depth_left, m.width, m.height, m.frame_count)
    dr = read_depth_sequence(m.depth_right, m.width, m.height, m.frame_count)
    for name, s in (("left", left), ("right", right), ("depth_left", dl), ("depth_right", dr)):
        if len(s) < m.frame_count:
            raise TruncatedFrame(f"{name}: manifest wants {m.frame_count} frames, file holds {len(s)}")
    return StereoSequence(left, right, dl, dr)


def write_stereo_sequence(directory, seq: StereoSequence, stem: str = "seq") -> Path:
    """Write the four raw streams plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = {
        "left": f"{stem}_left.yuv",
        "right": f"{stem}_right.yuv",
        "depth_left": f"{stem}_depth_left.raw",
        "depth_right": f"{stem}_depth_right.raw",
    }
    write_yuv_sequence(directory / names["left"], seq.left)
    write_yuv_sequence(directory / names["right"], seq.right)
    write_depth_sequence(directory / names["depth_left"], seq.depth_left)
    write_depth_sequence(directory / names["depth_right"], seq.depth_right)
    manifest = Manifest(
        width=seq.width, height=seq.height, frame_count=seq.frame_count,
        **{k: Path(v) for k, v in names.items()},
    )
    out = directory / f"{stem}.json"
    out.write_text(manifest.to_json())
    return out
