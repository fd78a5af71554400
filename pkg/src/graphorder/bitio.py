"""Bit-stream I/O and the gamma/delta/zeta universal integer codes.

Bits fill bytes most-significant-bit first.  All three codes encode
integers x >= 1:

* gamma: floor(log2 x) zeros, then the (floor(log2 x) + 1)-bit binary of x.
* delta: gamma code of floor(log2 x) + 1, then the low floor(log2 x) bits.
* zeta_k: with h = floor(floor(log2 x) / k), the unary code of h + 1
  (h zeros then a one), then x - 2^(h*k) in minimal binary over the
  interval [0, 2^((h+1)*k) - 2^(h*k)).

Minimal binary over an interval of size z uses s = ceil(log2 z) bits,
except that the first 2^s - z values take only s - 1 bits.
"""

from __future__ import annotations

RESIDUAL_FAMILIES = ("gamma", "delta", "zeta")


class BitWriter:
    """Append-only bit sink; bytes are emitted MSB-first."""

    __slots__ = ("_buf", "_acc", "_nacc", "_bits")

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self._bits = 0

    @property
    def bit_length(self) -> int:
        return self._bits

    def write_bits(self, value: int, width: int) -> None:
        if width < 0 or (width == 0 and value):
            raise ValueError("bad width")
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._acc = (self._acc << width) | value
        self._nacc += width
        self._bits += width
        while self._nacc >= 8:
            self._nacc -= 8
            self._buf.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= (1 << self._nacc) - 1

    def write_unary(self, q: int) -> None:
        """q - 1 zeros followed by a one (q >= 1)."""
        if q < 1:
            raise ValueError("unary code defined for q >= 1")
        self.write_bits(1, q)

    def write_gamma(self, x: int) -> None:
        if x < 1:
            raise ValueError(f"gamma code defined for x >= 1, got {x}")
        b = x.bit_length()
        self.write_bits(x, 2 * b - 1)

    def write_delta(self, x: int) -> None:
        if x < 1:
            raise ValueError(f"delta code defined for x >= 1, got {x}")
        b = x.bit_length()
        self.write_gamma(b)
        self.write_bits(x - (1 << (b - 1)), b - 1)

    def write_minimal_binary(self, v: int, z: int) -> None:
        """v in [0, z) using ceil(log2 z) or one fewer bits."""
        if not 0 <= v < z:
            raise ValueError("value out of interval")
        if z == 1:
            return
        s = (z - 1).bit_length()
        short = (1 << s) - z
        if v < short:
            self.write_bits(v, s - 1)
        else:
            self.write_bits(v + short, s)

    def write_zeta(self, x: int, k: int) -> None:
        if x < 1:
            raise ValueError(f"zeta code defined for x >= 1, got {x}")
        if k < 1:
            raise ValueError("zeta parameter k must be >= 1")
        h = (x.bit_length() - 1) // k
        self.write_unary(h + 1)
        base = 1 << (h * k)
        self.write_minimal_binary(x - base, (base << k) - base)

    def getvalue(self) -> bytes:
        """Bytes written so far, zero-padded to a whole byte."""
        out = bytearray(self._buf)
        if self._nacc:
            out.append((self._acc << (8 - self._nacc)) & 0xFF)
        return bytes(out)

    def bits(self) -> str:
        """The stream as a '0'/'1' string (testing and debugging aid)."""
        s = "".join(f"{b:08b}" for b in self._buf)
        if self._nacc:
            s += f"{self._acc:0{self._nacc}b}"
        return s


class BitReader:
    """Sequential reader over an MSB-first byte buffer."""

    __slots__ = ("_data", "_pos")

    def __init__(self, data: bytes, bit_offset: int = 0):
        self._data = data
        self._pos = bit_offset

    @property
    def position(self) -> int:
        return self._pos

    def seek(self, bit_offset: int) -> None:
        self._pos = bit_offset

    def read_bits(self, width: int) -> int:
        pos = self._pos
        end = pos + width
        if end > 8 * len(self._data):
            raise EOFError("bit stream exhausted")
        self._pos = end
        value = 0
        data = self._data
        while pos < end:
            byte = data[pos >> 3]
            avail = 8 - (pos & 7)
            take = min(avail, end - pos)
            value = (value << take) | ((byte >> (avail - take)) & ((1 << take) - 1))
            pos += take
        return value

    def read_unary(self) -> int:
        q = 1
        while self.read_bits(1) == 0:
            q += 1
        return q

    def read_gamma(self) -> int:
        z = 0
        while self.read_bits(1) == 0:
            z += 1
        if z == 0:
            return 1
        return (1 << z) | self.read_bits(z)

    def read_delta(self) -> int:
        b = self.read_gamma()
        if b == 1:
            return 1
        return (1 << (b - 1)) | self.read_bits(b - 1)

    def read_minimal_binary(self, z: int) -> int:
        if z == 1:
            return 0
        s = (z - 1).bit_length()
        short = (1 << s) - z
        v = self.read_bits(s - 1)
        if v < short:
            return v
        return ((v << 1) | self.read_bits(1)) - short

    def read_zeta(self, k: int) -> int:
        h = self.read_unary() - 1
        base = 1 << (h * k)
        return base + self.read_minimal_binary((base << k) - base)


# ---------------------------------------------------------------------------
# code lengths (used for exact-cost reference selection without writing bits)


def gamma_length(x: int) -> int:
    return 2 * x.bit_length() - 1


def delta_length(x: int) -> int:
    b = x.bit_length()
    return gamma_length(b) + b - 1


def minimal_binary_length(v: int, z: int) -> int:
    if z == 1:
        return 0
    s = (z - 1).bit_length()
    return s - 1 if v < (1 << s) - z else s


def zeta_length(x: int, k: int) -> int:
    h = (x.bit_length() - 1) // k
    base = 1 << (h * k)
    return h + 1 + minimal_binary_length(x - base, (base << k) - base)


# ---------------------------------------------------------------------------
# convenience single-value encoders (return '0'/'1' strings)


def encode_gamma(x: int) -> str:
    w = BitWriter()
    w.write_gamma(x)
    return w.bits()


def encode_delta(x: int) -> str:
    w = BitWriter()
    w.write_delta(x)
    return w.bits()


def encode_zeta(x: int, k: int) -> str:
    w = BitWriter()
    w.write_zeta(x, k)
    return w.bits()
