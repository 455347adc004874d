"""Tests for Gray-coded square QAM mapping, demapping, and EVM."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlclink.constellation import (
    QamConstellation,
    build_constellation,
    compute_evm,
    demap_symbols,
    map_bits,
)

SUPPORTED_ORDERS = [4, 16, 64, 256]
RNG_SEED_ROUNDTRIP = 42
RNG_SEED_NEAREST = 7
RNG_SEED_EVM = 99
UNIT_ENERGY_TOL = 1e-12


def random_bits(rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw a uniform bit vector of the requested length."""
    return rng.integers(0, 2, size=count)


class TestAlphabet:
    """Validate the constellation alphabets themselves."""

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_alphabet_size(self, order: int) -> None:
        """Verify that the alphabet holds exactly M distinct points."""
        c = build_constellation(order)
        assert len(c.points) == order
        assert len(np.unique(np.round(c.points, 12))) == order

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_unit_average_energy(self, order: int) -> None:
        """Verify that mean symbol energy over the alphabet is exactly one."""
        c = build_constellation(order)
        energy = np.mean(np.abs(c.points) ** 2)
        np.testing.assert_allclose(energy, 1.0, atol=UNIT_ENERGY_TOL)

    def test_qpsk_corner_point(self) -> None:
        """Verify the all-zeros label of 4-QAM lands on (1+j)/sqrt(2)."""
        c = build_constellation(4)
        symbol = c.map_bits(np.array([0, 0]))[0]
        np.testing.assert_allclose(symbol, (1 + 1j) / np.sqrt(2), atol=1e-15)

    def test_16qam_levels(self) -> None:
        """Verify 16-QAM uses the odd levels {-3,-1,1,3} scaled by sqrt(10)."""
        c = build_constellation(16)
        levels = np.unique(np.round(np.real(c.points) * np.sqrt(10)))
        np.testing.assert_array_equal(levels, [-3, -1, 1, 3])
        np.testing.assert_allclose(c.scale, np.sqrt(10))

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_gray_axis_neighbors(self, order: int) -> None:
        """Verify adjacent points along each axis differ in exactly one bit."""
        c = build_constellation(order)
        side = int(np.sqrt(order))
        k = c.bits_per_symbol
        grid = {}
        for label in range(order):
            p = c.map_labels(np.array([label]))[0] * c.scale
            i = int(np.round((np.real(p) + side - 1) / 2))
            q = int(np.round((np.imag(p) + side - 1) / 2))
            grid[(i, q)] = label
        pairs = 0
        for (i, q), label in grid.items():
            for ni, nq in ((i + 1, q), (i, q + 1)):
                if (ni, nq) not in grid:
                    continue
                other = grid[(ni, nq)]
                assert bin(label ^ other).count("1") == 1
                pairs += 1
        assert pairs == 2 * side * (side - 1)

    def test_unsupported_order_rejected(self) -> None:
        """Verify that non-square or unsupported orders raise ValueError."""
        for order in (2, 8, 32, 100, 1024):
            with pytest.raises(ValueError):
                build_constellation(order)


class TestMapping:
    """Validate bit-to-symbol mapping."""

    @pytest.fixture
    def rng(self) -> np.random.Generator:
        """Provide a deterministic generator for mapping tests."""
        return np.random.default_rng(RNG_SEED_ROUNDTRIP)

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_symbol_count(self, order: int, rng: np.random.Generator) -> None:
        """Verify that n*k bits produce exactly n symbols."""
        k = int(np.log2(order))
        bits = random_bits(rng, 50 * k)
        assert map_bits(bits, order).shape == (50,)

    def test_mapping_is_injective(self) -> None:
        """Verify distinct bit groups map to distinct symbols."""
        for order in SUPPORTED_ORDERS:
            c = build_constellation(order)
            k = c.bits_per_symbol
            labels = np.arange(order)
            bits = ((labels[:, None] >> np.arange(k - 1, -1, -1)) & 1).ravel()
            symbols = map_bits(bits, order)
            assert len(np.unique(np.round(symbols, 12))) == order

    def test_empty_input(self) -> None:
        """Verify empty bit input yields an empty symbol vector."""
        assert map_bits(np.array([], dtype=int), 16).size == 0

    def test_partial_symbol_rejected(self) -> None:
        """Verify bit counts not divisible by k raise ValueError."""
        with pytest.raises(ValueError):
            map_bits(np.array([0, 1, 1]), 4)
        with pytest.raises(ValueError):
            map_bits(np.ones(9, dtype=int), 16)


class TestDemapping:
    """Validate minimum-distance demapping."""

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_noiseless_roundtrip(self, order: int) -> None:
        """Verify that demapping inverts mapping exactly without noise."""
        rng = np.random.default_rng(RNG_SEED_ROUNDTRIP)
        k = int(np.log2(order))
        bits = random_bits(rng, 512 * k)
        recovered = demap_symbols(map_bits(bits, order), order)
        np.testing.assert_array_equal(recovered, bits)

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_small_perturbation_roundtrip(self, order: int) -> None:
        """Verify perturbations well inside a decision cell are absorbed."""
        rng = np.random.default_rng(RNG_SEED_ROUNDTRIP)
        c = build_constellation(order)
        half_cell = 1.0 / c.scale
        k = c.bits_per_symbol
        bits = random_bits(rng, 256 * k)
        symbols = map_bits(bits, order)
        shift = 0.3 * half_cell * (1 + 1j)
        np.testing.assert_array_equal(demap_symbols(symbols + shift, order), bits)

    def test_midpoint_tie_is_deterministic(self) -> None:
        """Verify the origin of 16-QAM resolves to one fixed label."""
        c = build_constellation(16)
        np.testing.assert_array_equal(c.demap_bits(np.array([0j])), [0, 1, 0, 1])

    @pytest.mark.parametrize("order", SUPPORTED_ORDERS)
    def test_matches_exhaustive_nearest(self, order: int) -> None:
        """Verify sliced demapping agrees with a brute-force nearest search."""
        rng = np.random.default_rng(RNG_SEED_NEAREST)
        c = build_constellation(order)
        received = rng.normal(size=200) + 1j * rng.normal(size=200)
        fast = c.demap_labels(received)
        brute = np.argmin(np.abs(received[:, None] - c.points[None, :]), axis=1)
        # Ties between cells are measure-zero for continuous noise; the
        # labels must agree everywhere the distances are strictly ordered.
        distances = np.abs(received[:, None] - c.points[None, :])
        best = np.sort(distances, axis=1)
        strict = (best[:, 1] - best[:, 0]) > 1e-9
        np.testing.assert_array_equal(fast[strict], brute[strict])

    @settings(max_examples=50, deadline=None)
    @given(
        order=st.sampled_from(SUPPORTED_ORDERS),
        seed=st.integers(min_value=0, max_value=2**31 - 1),
    )
    def test_roundtrip_property(self, order: int, seed: int) -> None:
        """Verify map/demap is the identity for arbitrary random payloads."""
        rng = np.random.default_rng(seed)
        k = int(np.log2(order))
        bits = rng.integers(0, 2, size=32 * k)
        np.testing.assert_array_equal(
            demap_symbols(map_bits(bits, order), order), bits
        )


class TestEvm:
    """Validate error-vector-magnitude computation."""

    @pytest.fixture
    def reference(self) -> np.ndarray:
        """Provide a unit-energy reference sequence covering 16-QAM."""
        return build_constellation(16).points

    def test_perfect_signal(self, reference: np.ndarray) -> None:
        """Verify EVM of an exact copy is zero."""
        assert compute_evm(reference.copy(), reference) == 0.0

    def test_known_offset(self, reference: np.ndarray) -> None:
        """Verify a constant 0.1 offset over a unit-energy grid gives EVM 0.1."""
        np.testing.assert_allclose(
            compute_evm(reference + 0.1, reference), 0.1, rtol=1e-12
        )

    def test_awgn_evm_level(self, reference: np.ndarray) -> None:
        """Verify measured EVM tracks the injected noise RMS at 20 dB SNR."""
        rng = np.random.default_rng(RNG_SEED_EVM)
        reps = np.tile(reference, 4000)
        sigma = np.sqrt(0.01 / 2)
        noise = sigma * (rng.normal(size=reps.size) + 1j * rng.normal(size=reps.size))
        np.testing.assert_allclose(compute_evm(reps + noise, reps), 0.1, atol=0.005)

    def test_evm_snr_relation(self, reference: np.ndarray) -> None:
        """Verify 1/EVM^2 recovers the injected SNR within 0.5 dB."""
        rng = np.random.default_rng(RNG_SEED_EVM)
        reps = np.tile(reference, 2000)
        for snr_db in (5.0, 10.0, 15.0, 20.0, 25.0):
            snr = 10 ** (snr_db / 10)
            sigma = np.sqrt(1 / (2 * snr))
            noise = sigma * (
                rng.normal(size=reps.size) + 1j * rng.normal(size=reps.size)
            )
            evm = compute_evm(reps + noise, reps)
            measured_db = 10 * np.log10(1 / evm**2)
            assert abs(measured_db - snr_db) < 0.5

    def test_empty_input_rejected(self) -> None:
        """Verify empty inputs raise ValueError."""
        with pytest.raises(ValueError):
            compute_evm(np.array([]), np.array([]))

    def test_shape_mismatch_rejected(self) -> None:
        """Verify mismatched lengths raise ValueError."""
        with pytest.raises(ValueError):
            compute_evm(np.ones(3), np.ones(4))

    def test_zero_reference_rejected(self) -> None:
        """Verify an all-zero reference raises ValueError."""
        with pytest.raises(ValueError):
            compute_evm(np.ones(3), np.zeros(3))
