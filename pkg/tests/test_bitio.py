import numpy as np
import pytest

from graphorder.bitio import (
    BitReader,
    BitWriter,
    delta_length,
    encode_delta,
    encode_gamma,
    encode_zeta,
    gamma_length,
    minimal_binary_length,
    zeta_length,
)


def test_hand_encoded_values():
    assert encode_gamma(1) == "1"
    assert encode_gamma(4) == "00100"
    assert encode_delta(4) == "01100"
    assert encode_zeta(1, 3) == "100"


def test_gamma_small_table():
    # first few codewords spelled out from the definition
    expected = {1: "1", 2: "010", 3: "011", 4: "00100", 5: "00101", 6: "00110", 7: "00111", 8: "0001000"}
    for x, bits in expected.items():
        assert encode_gamma(x) == bits


def test_domain_errors():
    w = BitWriter()
    for fn in (w.write_gamma, w.write_delta):
        with pytest.raises(ValueError):
            fn(0)
    with pytest.raises(ValueError):
        w.write_zeta(0, 3)
    with pytest.raises(ValueError):
        w.write_zeta(1, 0)


@pytest.mark.parametrize("family", ["gamma", "delta", "zeta1", "zeta2", "zeta3", "zeta5"])
def test_roundtrip_full_range(family):
    w = BitWriter()
    values = list(range(1, (1 << 16) + 1))
    if family == "gamma":
        for x in values:
            w.write_gamma(x)
        read = BitReader(w.getvalue()).read_gamma
        lengths = [gamma_length(x) for x in values]
    elif family == "delta":
        for x in values:
            w.write_delta(x)
        read = BitReader(w.getvalue()).read_delta
        lengths = [delta_length(x) for x in values]
    else:
        k = int(family[4:])
        for x in values:
            w.write_zeta(x, k)
        r = BitReader(w.getvalue())
        read = lambda: r.read_zeta(k)
        lengths = [zeta_length(x, k) for x in values]
    assert w.bit_length == sum(lengths)
    for x in values:
        assert read() == x


def test_zeta1_equals_gamma():
    for x in list(range(1, 200)) + [10**6, 2**40 + 7]:
        assert encode_zeta(x, 1) == encode_gamma(x)


def test_length_functions_match_writer():
    rng = np.random.default_rng(8)
    for x in rng.integers(1, 1 << 40, size=200).tolist():
        assert len(encode_gamma(x)) == gamma_length(x)
        assert len(encode_delta(x)) == delta_length(x)
        for k in (1, 2, 3, 4):
            assert len(encode_zeta(x, k)) == zeta_length(x, k)


def test_minimal_binary_roundtrip():
    for z in range(1, 70):
        w = BitWriter()
        for v in range(z):
            w.write_minimal_binary(v, z)
        r = BitReader(w.getvalue())
        got = [r.read_minimal_binary(z) for _ in range(z)]
        assert got == list(range(z))
        assert w.bit_length == sum(minimal_binary_length(v, z) for v in range(z))


def test_msb_first_fill():
    w = BitWriter()
    w.write_bits(1, 1)          # 1.......
    w.write_bits(0b0110, 4)     # 10110...
    assert w.getvalue() == bytes([0b10110000])
    assert w.bits() == "10110"


def test_random_bit_sequences_roundtrip():
    rng = np.random.default_rng(77)
    for _ in range(50):
        widths = rng.integers(1, 40, size=64).tolist()
        vals = [int(rng.integers(0, 1 << w)) for w in widths]
        w = BitWriter()
        for v, width in zip(vals, widths):
            w.write_bits(v, width)
        r = BitReader(w.getvalue())
        assert [r.read_bits(width) for width in widths] == vals


def test_reader_eof():
    r = BitReader(b"\xff")
    r.read_bits(8)
    with pytest.raises(EOFError):
        r.read_bits(1)
