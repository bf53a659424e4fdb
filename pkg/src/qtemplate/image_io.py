"""Binary image model, netpbm I/O, pixel-inversion noise and amplitude maps.

Pixel polarity follows the netpbm standard: a PBM bit of 1 is black
(absorptive) and 0 is white (reflective).  The white pixels are the *points*
of an image, i.e. the marked items of the search.  Dimensions must be powers
of two so that coordinates fit binary registers exactly.

Coordinate encoding: basis index = x * height + y, with the x register on the
most significant qubits.  Noise uses NumPy's PCG64 generator; pixels are
flipped by comparing one uniform draw per pixel (row-major) against the flip
probability, so flip sets are reproducible for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from .core_state import StateVector
from .errors import PbmParseError

_WHITESPACE = b" \t\r\n\x0b\x0c"


class BinaryImage:
    """Black/white pixel array of power-of-two dimensions."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        pixels = np.asarray(pixels, dtype=bool)
        if pixels.ndim != 2:
            raise ValueError("pixels must be a 2-D array (height x width)")
        height, width = pixels.shape
        for name, value in (("width", width), ("height", height)):
            if value < 2 or value & (value - 1):
                raise ValueError(f"{name} {value} is not a power of two >= 2")
        self.pixels = pixels

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def qubits_x(self) -> int:
        return self.width.bit_length() - 1

    @property
    def qubits_y(self) -> int:
        return self.height.bit_length() - 1

    @property
    def point_count(self) -> int:
        return int(self.pixels.sum())

    def points(self) -> list[tuple[int, int]]:
        """All white pixel coordinates ``(x, y)`` in row-major order."""
        ys, xs = np.nonzero(self.pixels)
        return list(zip(xs.tolist(), ys.tolist()))

    def point_indices(self) -> np.ndarray:
        """Basis indices ``x * height + y`` of the points."""
        ys, xs = np.nonzero(self.pixels)
        return (xs.astype(np.int64) * self.height + ys).astype(np.int64)

    def complement(self) -> "BinaryImage":
        return BinaryImage(~self.pixels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self) -> str:
        return f"BinaryImage({self.width}x{self.height}, points={self.point_count})"


class _Reader:
    """Byte cursor with netpbm whitespace/comment handling."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space(self) -> None:
        data = self.data
        while self.pos < len(data):
            byte = data[self.pos : self.pos + 1]
            if byte in (b"#",):
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            elif byte and byte in _WHITESPACE:
                self.pos += 1
            else:
                return

    def token(self, what: str) -> bytes:
        self.skip_space()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos : self.pos + 1] not in _WHITESPACE:
            self.pos += 1
        if self.pos == start:
            raise PbmParseError(f"unexpected end of input while reading {what}", start)
        return data[start : self.pos]

    def integer(self, what: str) -> int:
        start = self.pos
        tok = self.token(what)
        try:
            return int(tok)
        except ValueError:
            raise PbmParseError(f"invalid {what} {tok!r}", start) from None


def _check_dimension(value: int, what: str, offset: int) -> None:
    if value < 2 or value & (value - 1):
        raise PbmParseError(f"{what} {value} is not a power of two >= 2", offset)


def parse_pbm(data: bytes) -> BinaryImage:
    """Decode a P1 (ASCII) or P4 (packed) PBM into a :class:`BinaryImage`."""
    reader = _Reader(bytes(data))
    magic = reader.token("magic number")
    if magic not in (b"P1", b"P4"):
        raise PbmParseError(f"not a PBM file, magic {magic!r}", 0)
    at = reader.pos
    width = reader.integer("width")
    _check_dimension(width, "width", at)
    at = reader.pos
    height = reader.integer("height")
    _check_dimension(height, "height", at)

    bits = np.zeros((height, width), dtype=bool)
    if magic == b"P1":
        count = 0
        while count < width * height:
            reader.skip_space()
            if reader.pos >= len(reader.data):
                raise PbmParseError(
                    f"truncated P1 payload: {count} of {width * height} bits", reader.pos
                )
            byte = reader.data[reader.pos : reader.pos + 1]
            if byte not in (b"0", b"1"):
                raise PbmParseError(f"invalid P1 bit {byte!r}", reader.pos)
            bits[count // width, count % width] = byte == b"1"
            reader.pos += 1
            count += 1
    else:
        # Single whitespace byte separates the header from the packed payload.
        if reader.pos >= len(reader.data) or reader.data[reader.pos : reader.pos + 1] not in _WHITESPACE:
            raise PbmParseError("expected whitespace before P4 payload", reader.pos)
        reader.pos += 1
        row_bytes = (width + 7) // 8
        needed = row_bytes * height
        payload = reader.data[reader.pos : reader.pos + needed]
        if len(payload) < needed:
            raise PbmParseError(
                f"truncated P4 payload: {len(payload)} of {needed} bytes",
                reader.pos + len(payload),
            )
        rows = np.frombuffer(payload, dtype=np.uint8).reshape(height, row_bytes)
        unpacked = np.unpackbits(rows, axis=1)[:, :width]
        bits = unpacked.astype(bool)

    # PBM bit 1 = black; points are the white pixels.
    return BinaryImage(~bits)


def write_pbm(image: BinaryImage, format: str = "P1") -> bytes:
    """Encode an image; ``parse_pbm(write_pbm(img))`` round-trips bit-exactly."""
    header = f"{format}\n{image.width} {image.height}\n".encode("ascii")
    black = ~image.pixels
    if format == "P1":
        body = b"\n".join(
            b" ".join(b"1" if bit else b"0" for bit in row) for row in black
        )
        return header + body + b"\n"
    if format == "P4":
        packed = np.packbits(black.astype(np.uint8), axis=1)
        return header + packed.tobytes()
    raise ValueError(f"unsupported PBM format {format!r}")


def invert_pixels(image: BinaryImage, p: float, rng_seed: int) -> BinaryImage:
    """Flip each pixel independently with probability ``p`` (deterministic per seed)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability {p} outside [0, 1]")
    rng = np.random.default_rng(rng_seed)
    flips = rng.random(image.pixels.shape) < p
    return BinaryImage(image.pixels ^ flips)


def noisy_filename(name: str, noise: float, seed: int) -> str:
    """Conventional file name ``<name>_<noise_pct>_<seed>.pbm``."""
    return f"{name}_{100 * noise:g}_{seed}.pbm"


class AmplitudeMap:
    """Per-pixel squared amplitudes of a coordinate-register state."""

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D array (height x width)")
        if values.min(initial=0.0) < 0.0:
            raise ValueError("squared amplitudes cannot be negative")
        if values.sum() > 1.0 + 1e-9:
            raise ValueError("squared amplitudes sum exceeds 1")
        self.values = values

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def render_amplitude_map(state: StateVector, n_x: int, n_y: int) -> AmplitudeMap:
    """Squared amplitude per pixel, undoing the ``x * N_y + y`` index encoding."""
    if n_x < 1 or n_y < 1 or n_x + n_y != state.num_qubits:
        raise ValueError(
            f"register split {n_x}+{n_y} does not match a {state.num_qubits}-qubit state"
        )
    probs = state.probabilities().reshape(1 << n_x, 1 << n_y)
    return AmplitudeMap(probs.T.copy())


def write_pgm(
    amap: AmplitudeMap, format: str = "P5", half_max_highlight: bool = False
) -> bytes:
    """Render the map as 8-bit grayscale PGM (P2 ASCII or P5 binary).

    With ``half_max_highlight``, pixels above half the maximum value are
    saturated to white and the quarter-of-maximum contour is drawn in black;
    everything else keeps the linear gray scale.
    """
    values = amap.values
    vmax = float(values.max(initial=0.0))
    if vmax > 0.0:
        gray = np.rint(values / vmax * 255.0).astype(np.uint8)
    else:
        gray = np.zeros_like(values, dtype=np.uint8)

    if half_max_highlight and vmax > 0.0:
        quarter = vmax / 4.0
        above = values >= quarter
        padded = np.pad(above, 1, constant_values=True)
        has_low_neighbor = ~(
            padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
        )
        gray[above & has_low_neighbor] = 0
        gray[values > vmax / 2.0] = 255

    header = f"{format}\n{amap.width} {amap.height}\n255\n".encode("ascii")
    if format == "P2":
        body = b"\n".join(b" ".join(str(v).encode() for v in row) for row in gray)
        return header + body + b"\n"
    if format == "P5":
        return header + gray.tobytes()
    raise ValueError(f"unsupported PGM format {format!r}")
