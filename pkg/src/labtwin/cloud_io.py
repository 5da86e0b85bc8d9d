"""Colored point cloud ingest/emit with bounded-memory streaming readers.

Formats: whitespace ``xyzrgb`` text, uncompressed LAS (point formats 2/3),
and the internal little-endian binary. World frame is right-handed, Z-up,
meters.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import ResourceError, ValidationError
from .geometry import Aabb

CHUNK_POINTS = 65536

FORMATS = ("xyzrgb-text", "las", "internal-binary")

# internal-binary record: {f64 x,y,z; u8 r,g,b; u8 pad}
BINARY_MAGIC = b"LTPC"
BINARY_VERSION = 1
BINARY_DTYPE = np.dtype([
    ("x", "<f8"), ("y", "<f8"), ("z", "<f8"),
    ("r", "u1"), ("g", "u1"), ("b", "u1"), ("pad", "u1"),
])

LAS_HEADER_FMT = "<4sHH16sBB32s32sHHHIIBHI5I12d"
LAS_HEADER_SIZE = 227
LAS_SCALE = 0.001
_LAS_PT2 = np.dtype([
    ("X", "<i4"), ("Y", "<i4"), ("Z", "<i4"), ("intensity", "<u2"),
    ("flags", "u1"), ("cls", "u1"), ("angle", "i1"), ("user", "u1"),
    ("src", "<u2"), ("red", "<u2"), ("green", "<u2"), ("blue", "<u2"),
])
_LAS_PT3 = np.dtype(_LAS_PT2.descr + [("gps", "<f8")])


@dataclass(frozen=True)
class ColorPoint:
    """One colored sample: position in meters, 8-bit RGB."""

    x: float
    y: float
    z: float
    r: int
    g: int
    b: int


@dataclass
class PointCloud:
    """In-memory cloud: positions (N, 3) float64, colors (N, 3) uint8."""

    positions: np.ndarray
    colors: np.ndarray
    bounds: Optional[Aabb]
    count: int

    @classmethod
    def from_arrays(cls, positions, colors) -> "PointCloud":
        positions = np.ascontiguousarray(positions, dtype=np.float64).reshape(-1, 3)
        colors = np.ascontiguousarray(colors, dtype=np.uint8).reshape(-1, 3)
        n = len(positions)
        bounds = Aabb.of_points(positions) if n else None
        return cls(positions, colors, bounds, n)


Chunk = tuple[np.ndarray, np.ndarray]


class CloudStream:
    """Iterator of (positions, colors) chunks.

    ``bounds`` and ``count`` become available once the stream is exhausted;
    memory use is bounded by the chunk size regardless of file size.
    """

    def __init__(self, chunks: Iterator[Chunk]):
        self._chunks = chunks
        self.count = 0
        self._lo = np.full(3, np.inf)
        self._hi = np.full(3, -np.inf)
        self.exhausted = False

    @property
    def bounds(self) -> Optional[Aabb]:
        if not self.exhausted:
            raise RuntimeError("bounds available only after the stream is consumed")
        if self.count == 0:
            return None
        return Aabb(self._lo, self._hi)

    def __iter__(self) -> Iterator[Chunk]:
        for pos, rgb in self._chunks:
            if len(pos):
                self.count += len(pos)
                np.minimum(self._lo, pos.min(axis=0), out=self._lo)
                np.maximum(self._hi, pos.max(axis=0), out=self._hi)
            yield pos, rgb
        self.exhausted = True

    def collect(self) -> PointCloud:
        parts = list(self)
        if not parts:
            return PointCloud(np.empty((0, 3)), np.empty((0, 3), np.uint8), None, 0)
        pos = np.concatenate([p for p, _ in parts])
        rgb = np.concatenate([c for _, c in parts])
        return PointCloud(pos, rgb, self.bounds, self.count)


def read_cloud(path, format: str, chunk_points: int = CHUNK_POINTS) -> CloudStream:
    """Open ``path`` as a chunked stream of colored points."""
    path = Path(path)
    if not path.exists():
        raise ResourceError(f"{path}: no such file")
    if format == "xyzrgb-text":
        gen = _read_text(path, chunk_points)
    elif format == "las":
        gen = _read_las(path, chunk_points)
    elif format == "internal-binary":
        gen = _read_binary(path, chunk_points)
    else:
        raise ValidationError(f"unknown cloud format {format!r}")
    return CloudStream(gen)


def load_cloud(path, format: str) -> PointCloud:
    return read_cloud(path, format).collect()


def write_cloud(chunks: Iterable[Chunk], path, format: str) -> int:
    """Write a chunk stream; returns the number of points written.

    Rejects non-finite coordinates, reporting the global point index.
    """
    path = Path(path)
    if format == "xyzrgb-text":
        writer = _write_text
    elif format == "las":
        writer = _write_las
    elif format == "internal-binary":
        writer = _write_binary
    else:
        raise ValidationError(f"unknown cloud format {format!r}")
    try:
        return writer(path, _checked(chunks))
    except OSError as exc:
        raise ResourceError(f"{path}: {exc}") from exc


def cloud_chunks(cloud: PointCloud, chunk_points: int = CHUNK_POINTS) -> Iterator[Chunk]:
    for i in range(0, cloud.count, chunk_points):
        yield cloud.positions[i:i + chunk_points], cloud.colors[i:i + chunk_points]
    if cloud.count == 0:
        return


def _checked(chunks: Iterable[Chunk]) -> Iterator[Chunk]:
    base = 0
    for pos, rgb in chunks:
        pos = np.ascontiguousarray(pos, dtype=np.float64).reshape(-1, 3)
        rgb = np.ascontiguousarray(rgb, dtype=np.uint8).reshape(-1, 3)
        finite = np.isfinite(pos).all(axis=1)
        if not finite.all():
            idx = base + int(np.flatnonzero(~finite)[0])
            raise ValidationError(f"non-finite coordinate at point {idx}")
        base += len(pos)
        yield pos, rgb


# --- xyzrgb text ------------------------------------------------------------

def _read_text(path: Path, chunk_points: int) -> Iterator[Chunk]:
    with open(path, "r", encoding="utf-8") as fh:
        batch: list[str] = []
        linenos: list[int] = []
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            batch.append(s)
            linenos.append(lineno)
            if len(batch) >= chunk_points:
                yield _parse_text_batch(path, batch, linenos)
                batch, linenos = [], []
        if batch:
            yield _parse_text_batch(path, batch, linenos)


def _parse_text_batch(path: Path, lines: list[str], linenos: list[int]) -> Chunk:
    try:
        arr = np.array([ln.split() for ln in lines], dtype=np.float64)
        if arr.shape[1] != 6:
            raise ValueError("wrong field count")
    except ValueError:
        _diagnose_text(path, lines, linenos)
        raise ValidationError(f"{path}: malformed text record")  # pragma: no cover
    pos = arr[:, :3]
    rgb = arr[:, 3:]
    bad = ~np.isfinite(pos).all(axis=1)
    bad |= (rgb < 0).any(axis=1) | (rgb > 255).any(axis=1) | (rgb != np.floor(rgb)).any(axis=1)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValidationError(f"{path}: line {linenos[i]}: invalid record {lines[i]!r}")
    return np.ascontiguousarray(pos), rgb.astype(np.uint8)


def _diagnose_text(path: Path, lines: list[str], linenos: list[int]) -> None:
    for lineno, ln in zip(linenos, lines):
        parts = ln.split()
        if len(parts) != 6:
            raise ValidationError(
                f"{path}: line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            [float(p) for p in parts]
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: unparsable value in {ln!r}")


def _write_text(path: Path, chunks: Iterator[Chunk]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for pos, rgb in chunks:
            out = np.empty((len(pos), 6))
            out[:, :3] = pos
            out[:, 3:] = rgb
            np.savetxt(fh, out, fmt=["%.10g", "%.10g", "%.10g", "%d", "%d", "%d"])
            count += len(pos)
    return count


# --- internal binary --------------------------------------------------------

def _read_binary(path: Path, chunk_points: int) -> Iterator[Chunk]:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) < 16 or head[:4] != BINARY_MAGIC:
            raise ValidationError(f"{path}: not an LTPC file (offset 0)")
        version = struct.unpack("<I", head[4:8])[0]
        count = struct.unpack("<Q", head[8:16])[0]
        if version != BINARY_VERSION:
            raise ValidationError(f"{path}: unsupported LTPC version {version}")
        seen = 0
        while seen < count:
            want = min(chunk_points, count - seen)
            buf = fh.read(want * BINARY_DTYPE.itemsize)
            if len(buf) % BINARY_DTYPE.itemsize or not buf:
                raise ValidationError(
                    f"{path}: truncated at offset {16 + seen * BINARY_DTYPE.itemsize}")
            rec = np.frombuffer(buf, dtype=BINARY_DTYPE)
            pos = np.column_stack([rec["x"], rec["y"], rec["z"]])
            rgb = np.column_stack([rec["r"], rec["g"], rec["b"]])
            seen += len(rec)
            yield pos, rgb


def _write_binary(path: Path, chunks: Iterator[Chunk]) -> int:
    count = 0
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<IQ", BINARY_VERSION, 0))
        for pos, rgb in chunks:
            rec = np.zeros(len(pos), dtype=BINARY_DTYPE)
            rec["x"], rec["y"], rec["z"] = pos[:, 0], pos[:, 1], pos[:, 2]
            rec["r"], rec["g"], rec["b"] = rgb[:, 0], rgb[:, 1], rgb[:, 2]
            fh.write(rec.tobytes())
            count += len(pos)
        fh.seek(8)
        fh.write(struct.pack("<Q", count))
    return count


# --- LAS --------------------------------------------------------------------

def _read_las(path: Path, chunk_points: int) -> Iterator[Chunk]:
    with open(path, "rb") as fh:
        head = fh.read(LAS_HEADER_SIZE)
        if len(head) < LAS_HEADER_SIZE or head[:4] != b"LASF":
            raise ValidationError(f"{path}: not a LAS file")
        fields = struct.unpack(LAS_HEADER_FMT, head)
        offset_to_points = fields[11]
        fmt_id = fields[13] & 0x7F  # high bit flags LAZ compression
        if fields[13] & 0x80:
            raise ValidationError(f"{path}: LAZ compression not supported")
        rec_len = fields[14]
        count = fields[15]
        doubles = fields[21:]
        scale = np.array(doubles[0:3])
        off = np.array(doubles[3:6])
        if fmt_id == 2:
            dtype = _LAS_PT2
        elif fmt_id == 3:
            dtype = _LAS_PT3
        else:
            raise ValidationError(
                f"{path}: unsupported LAS point-format {fmt_id} (need 2 or 3)")
        if rec_len < dtype.itemsize:
            raise ValidationError(f"{path}: record length {rec_len} too small")
        stride = np.dtype({"names": list(dtype.names), "formats":
                           [dtype.fields[n][0] for n in dtype.names],
                           "offsets": [dtype.fields[n][1] for n in dtype.names],
                           "itemsize": rec_len})
        fh.seek(offset_to_points)
        seen = 0
        while seen < count:
            want = min(chunk_points, count - seen)
            buf = fh.read(want * rec_len)
            got = len(buf) // rec_len
            if got == 0:
                raise ValidationError(f"{path}: truncated after {seen} points")
            rec = np.frombuffer(buf[:got * rec_len], dtype=stride)
            pos = np.column_stack([
                rec["X"] * scale[0] + off[0],
                rec["Y"] * scale[1] + off[1],
                rec["Z"] * scale[2] + off[2],
            ])
            rgb = np.column_stack([rec["red"] >> 8, rec["green"] >> 8,
                                   rec["blue"] >> 8]).astype(np.uint8)
            seen += got
            yield pos, rgb


def _write_las(path: Path, chunks: Iterator[Chunk]) -> int:
    count = 0
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    off = None
    with open(path, "wb") as fh:
        fh.write(b"\0" * LAS_HEADER_SIZE)
        for pos, rgb in chunks:
            if off is None:
                off = np.floor(pos[0]) if len(pos) else None
            if not len(pos):
                continue
            rec = np.zeros(len(pos), dtype=_LAS_PT2)
            q = np.round((pos - off) / LAS_SCALE)
            if (np.abs(q) >= 2**31).any():
                raise ValidationError("coordinate range exceeds LAS int32 grid")
            rec["X"], rec["Y"], rec["Z"] = q[:, 0], q[:, 1], q[:, 2]
            for name, ch in (("red", 0), ("green", 1), ("blue", 2)):
                c = rgb[:, ch].astype(np.uint16)
                rec[name] = (c << 8) | c
            fh.write(rec.tobytes())
            count += len(pos)
            np.minimum(lo, pos.min(axis=0), out=lo)
            np.maximum(hi, pos.max(axis=0), out=hi)
        if off is None:
            off = np.zeros(3)
        if count == 0:
            lo = hi = np.zeros(3)
        header = struct.pack(
            LAS_HEADER_FMT,
            b"LASF", 0, 0, b"\0" * 16, 1, 2,
            b"labtwin".ljust(32, b"\0"), b"labtwin".ljust(32, b"\0"),
            1, 2026, LAS_HEADER_SIZE, LAS_HEADER_SIZE, 0,
            2, _LAS_PT2.itemsize, count, count, 0, 0, 0, 0,
            LAS_SCALE, LAS_SCALE, LAS_SCALE, off[0], off[1], off[2],
            hi[0], lo[0], hi[1], lo[1], hi[2], lo[2],
        )
        fh.seek(0)
        fh.write(header)
    return count


# --- synthetic clouds -------------------------------------------------------

ROOM_ENVELOPE = Aabb(np.zeros(3), np.array([40.0, 100.0, 6.0]))


def synth_cloud(shape: str, count: int, seed: int) -> PointCloud:
    """Deterministic synthetic cloud: ``box`` or ``room-with-aisles``."""
    if count < 0:
        raise ValidationError("count must be >= 0")
    rng = np.random.default_rng(seed)
    if shape == "box":
        pos = rng.random((count, 3)) * 10.0
        rgb = rng.integers(0, 256, (count, 3), dtype=np.uint8)
        return PointCloud.from_arrays(pos, rgb)
    if shape == "room-with-aisles":
        return _synth_room(rng, count)
    raise ValidationError(f"unknown synth shape {shape!r}")


def _box_faces(rng, n: int, lo, hi) -> np.ndarray:
    """Uniform samples on the surface of an axis-aligned box."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    size = hi - lo
    areas = np.array([size[1] * size[2], size[0] * size[2], size[0] * size[1]])
    areas = np.repeat(areas, 2)  # -x,+x,-y,+y,-z,+z
    face = rng.choice(6, size=n, p=areas / areas.sum())
    pts = lo + rng.random((n, 3)) * size
    axis = face // 2
    side = face % 2
    pts[np.arange(n), axis] = np.where(side, hi[axis], lo[axis])
    return pts


def _synth_room(rng, count: int) -> PointCloud:
    """Floor, walls, and aisle-separated equipment blocks in a 40x100x6 hall."""
    env = ROOM_ENVELOPE
    if count == 0:
        return PointCloud.from_arrays(np.empty((0, 3)), np.empty((0, 3), np.uint8))
    n_floor = count * 30 // 100
    n_wall = count * 20 // 100
    n_blocks = count - n_floor - n_wall

    floor = rng.random((n_floor, 3)) * [40, 100, 0]
    walls = _box_faces(rng, n_wall, env.min, env.max)
    # keep walls only (drop roof/floor duplicates onto vertical faces)
    on_roof = walls[:, 2] >= 6.0
    walls[on_roof, 2] = rng.random(int(on_roof.sum())) * 6.0
    walls[on_roof, 0] = np.where(rng.random(int(on_roof.sum())) < 0.5, 0.0, 40.0)

    # two columns of equipment blocks with a central and two side aisles
    blocks = []
    for col, x0 in ((0, 5.0), (1, 24.0)):
        for row in range(8):
            y0 = 6.0 + row * 12.0
            blocks.append((np.array([x0, y0, 0.0]),
                           np.array([x0 + 11.0, y0 + 7.0, 2.5])))
    per = np.full(len(blocks), n_blocks // len(blocks))
    per[:n_blocks - int(per.sum())] += 1
    parts = [floor, walls]
    for (lo, hi), m in zip(blocks, per):
        if m:
            parts.append(_box_faces(rng, int(m), lo, hi))
    pos = np.concatenate(parts)[:count]

    rgb = np.empty((len(pos), 3), dtype=np.uint8)
    rgb[:] = (90, 90, 100)
    rgb[pos[:, 2] <= 0.0] = (70, 70, 70)
    rgb[pos[:, 2] >= 2.0] = (160, 160, 150)
    jitter = rng.integers(-20, 21, rgb.shape)
    rgb = np.clip(rgb.astype(np.int16) + jitter, 0, 255).astype(np.uint8)
    return PointCloud.from_arrays(pos, rgb)
