import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtemplate.circuit_ops import prepare_point_state
from qtemplate.core_state import StateVector
from qtemplate.errors import PbmParseError
from qtemplate.image_io import (
    AmplitudeMap,
    BinaryImage,
    invert_pixels,
    noisy_filename,
    parse_pbm,
    render_amplitude_map,
    write_pbm,
    write_pgm,
)

from conftest import random_image


def reencode_p1_as_p4(text: bytes) -> bytes:
    """Independent P1 -> P4 converter used as a round-trip oracle."""
    tokens = []
    for line in text.decode("ascii").splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    assert tokens[0] == "P1"
    width, height = int(tokens[1]), int(tokens[2])
    bits = "".join(tokens[3:])
    assert len(bits) == width * height
    out = bytearray(f"P4\n{width} {height}\n".encode("ascii"))
    for y in range(height):
        row = bits[y * width : (y + 1) * width]
        row = row + "0" * (-len(row) % 8)
        for i in range(0, len(row), 8):
            out.append(int(row[i : i + 8], 2))
    return bytes(out)


class TestParsePbm:
    def test_p1_example(self):
        image = parse_pbm(b"P1\n2 2\n0 1\n1 0\n")
        assert image.points() == [(0, 0), (1, 1)]
        assert image.point_count == 2

    def test_p4_matches_p1(self):
        p1 = b"P1\n2 2\n0 1\n1 0\n"
        assert parse_pbm(reencode_p1_as_p4(p1)) == parse_pbm(p1)

    def test_non_power_of_two_width(self):
        with pytest.raises(PbmParseError, match="power of two"):
            parse_pbm(b"P1\n3 2\n0 1 0\n1 0 1\n")

    def test_comments_skipped(self):
        image = parse_pbm(b"P1\n# a comment\n2 2 # another\n0 1\n# mid-data\n1 0\n")
        assert image.points() == [(0, 0), (1, 1)]

    def test_bad_magic(self):
        with pytest.raises(PbmParseError, match="magic"):
            parse_pbm(b"P5\n2 2\n255\n....")

    def test_truncated_p1_names_offset(self):
        data = b"P1\n2 2\n0 1\n1"
        with pytest.raises(PbmParseError, match="truncated") as err:
            parse_pbm(data)
        assert err.value.offset == len(data)

    def test_truncated_p4_names_offset(self):
        data = b"P4\n16 16\n" + b"\x00" * 5
        with pytest.raises(PbmParseError, match="truncated") as err:
            parse_pbm(data)
        assert err.value.offset == len(data)

    def test_invalid_p1_bit(self):
        with pytest.raises(PbmParseError, match="invalid P1 bit"):
            parse_pbm(b"P1\n2 2\n0 2\n1 0\n")


class TestWritePbm:
    def test_round_trip_small(self):
        image = parse_pbm(b"P1\n2 2\n0 1\n1 0\n")
        assert parse_pbm(write_pbm(image, "P1")) == image
        assert parse_pbm(write_pbm(image, "P4")) == image

    def test_p1_magic_present(self):
        image = random_image(4, 4, seed=0)
        assert write_pbm(image, "P1").startswith(b"P1")

    def test_p4_independent_reencoding(self):
        image = random_image(16, 8, seed=1)
        assert write_pbm(image, "P4") == reencode_p1_as_p4(write_pbm(image, "P1"))

    def test_unsupported_format(self):
        with pytest.raises(ValueError):
            write_pbm(random_image(2, 2, seed=2), "P7")

    @settings(max_examples=30, deadline=None)
    @given(
        log_w=st.integers(min_value=1, max_value=6),
        log_h=st.integers(min_value=1, max_value=6),
        seed=st.integers(min_value=0, max_value=2**31),
        fmt=st.sampled_from(["P1", "P4"]),
    )
    def test_round_trip_property(self, log_w, log_h, seed, fmt):
        image = random_image(1 << log_w, 1 << log_h, seed)
        assert parse_pbm(write_pbm(image, fmt)) == image


class TestInvertPixels:
    def test_zero_probability_identity(self):
        image = random_image(8, 8, seed=3)
        assert invert_pixels(image, 0.0, 7) == image

    def test_certain_flip_is_complement(self):
        image = random_image(8, 8, seed=4)
        assert invert_pixels(image, 1.0, 7) == image.complement()

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            invert_pixels(random_image(2, 2, seed=5), 1.5, 0)

    def test_same_seed_is_pure(self):
        image = random_image(16, 16, seed=6)
        assert invert_pixels(image, 0.3, 99) == invert_pixels(image, 0.3, 99)

    def test_flip_count_statistics(self):
        # Binomial(512*512, 0.1): mean 26214.4, sigma ~153.6; 4-sigma window.
        image = BinaryImage(np.zeros((512, 512), dtype=bool))
        flipped = invert_pixels(image, 0.1, 2024)
        flips = int(flipped.pixels.sum())
        assert 26214.4 - 4 * 153.6 < flips < 26214.4 + 4 * 153.6


class TestPoints:
    def test_all_black(self):
        image = BinaryImage(np.zeros((4, 4), dtype=bool))
        assert image.points() == []
        assert image.point_count == 0

    def test_all_white(self):
        image = BinaryImage(np.ones((4, 4), dtype=bool))
        assert image.point_count == 16

    def test_checkerboard(self):
        grid = np.indices((4, 4)).sum(axis=0) % 2 == 0
        assert BinaryImage(grid).point_count == 8

    def test_row_major_order(self):
        pixels = np.zeros((2, 4), dtype=bool)
        pixels[0, 3] = True
        pixels[1, 0] = True
        assert BinaryImage(pixels).points() == [(3, 0), (0, 1)]

    def test_point_indices_encoding(self):
        pixels = np.zeros((4, 4), dtype=bool)
        pixels[2, 1] = True  # (x=1, y=2) -> 1*4 + 2 = 6
        assert list(BinaryImage(pixels).point_indices()) == [6]


class TestAmplitudeMap:
    def test_basis_state_single_pixel(self):
        state = StateVector.basis_state(4, 1 * 4 + 2)  # |x=1, y=2> on a 4x4 grid
        amap = render_amplitude_map(state, 2, 2)
        assert amap.values[2, 1] == pytest.approx(1.0)
        assert amap.values.sum() == pytest.approx(1.0)

    def test_uniform_state_flat(self):
        state = StateVector.basis_state(4, 0)
        for q in range(4):
            state.apply_hadamard(q)
        amap = render_amplitude_map(state, 2, 2)
        assert np.allclose(amap.values, 1 / 16)

    def test_two_point_state(self):
        pixels = np.zeros((2, 2), dtype=bool)
        pixels[0, 0] = pixels[1, 1] = True
        _, state = prepare_point_state(BinaryImage(pixels))
        amap = render_amplitude_map(state, 1, 1)
        assert amap.values[0, 0] == pytest.approx(0.5)
        assert amap.values[1, 1] == pytest.approx(0.5)

    def test_register_mismatch(self):
        with pytest.raises(ValueError):
            render_amplitude_map(StateVector.basis_state(4, 0), 2, 3)

    def test_total_above_one_rejected(self):
        with pytest.raises(ValueError):
            AmplitudeMap(np.full((2, 2), 0.5))


def parse_pgm(data: bytes):
    # Simple split good enough for our own output: magic, dims, maxval, body.
    is_binary = data.startswith(b"P5")
    parts = data.split(b"\n", 3)
    magic, dims, maxval, body = parts[0], parts[1], parts[2], parts[3]
    width, height = map(int, dims.split())
    if is_binary:
        values = np.frombuffer(body[: width * height], dtype=np.uint8)
    else:
        values = np.array(body.split(), dtype=np.uint8)
    return magic, width, height, int(maxval), values.reshape(height, width)


class TestWritePgm:
    def test_linear_grayscale(self):
        amap = AmplitudeMap(np.array([[0.0, 0.1], [0.2, 0.4]]))
        magic, w, h, maxval, values = parse_pgm(write_pgm(amap, "P2"))
        assert (magic, w, h, maxval) == (b"P2", 2, 2, 255)
        assert values[1, 1] == 255
        assert values[0, 1] == round(0.1 / 0.4 * 255)

    def test_p5_matches_p2(self):
        amap = AmplitudeMap(np.array([[0.0, 0.1], [0.2, 0.4]]))
        _, _, _, _, ascii_values = parse_pgm(write_pgm(amap, "P2"))
        _, _, _, _, binary_values = parse_pgm(write_pgm(amap, "P5"))
        assert np.array_equal(ascii_values, binary_values)

    def test_highlight_and_isoline(self):
        values = np.zeros((4, 4))
        values[0, 0] = 0.4   # maximum -> highlighted
        values[2, 2] = 0.15  # above quarter (0.1), below half -> isoline
        values[3, 3] = 0.05  # below quarter -> linear gray
        amap = AmplitudeMap(values)
        _, _, _, _, gray = parse_pgm(write_pgm(amap, "P5", half_max_highlight=True))
        assert gray[0, 0] == 255
        assert gray[2, 2] == 0
        assert gray[3, 3] == round(0.05 / 0.4 * 255)


def test_noisy_filename_convention():
    assert noisy_filename("letterA", 0.05, 42) == "letterA_5_42.pbm"
    assert noisy_filename("b", 0.4, 7) == "b_40_7.pbm"
