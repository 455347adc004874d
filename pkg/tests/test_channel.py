"""Tests for the line-of-sight optical MIMO channel model."""

import numpy as np
import pytest

from vlclink.channel import (
    CALIBRATED_GAIN,
    GeometryConfig,
    apply_channel,
    generate_channel,
    snr_per_stream,
)

RNG_SEED_NOISE = 5
NOISE_STAT_SAMPLES = 400_000


@pytest.fixture
def geometry() -> GeometryConfig:
    """Provide the default desk-scale geometry."""
    return GeometryConfig()


class TestGenerateChannel:
    """Validate the Lambertian gain matrix."""

    def test_entry_formula(self, geometry: GeometryConfig) -> None:
        """Verify each entry against a hand-evaluated gain expression."""
        h = generate_channel(geometry)
        q = geometry.lambertian_order
        expected = np.empty((2, 2))
        for n, rx in enumerate((-0.5, 0.5)):
            for m, tx in enumerate((-0.5, 0.5)):
                d = np.hypot(1.0, rx - tx)
                cos = 1.0 / d
                expected[n, m] = geometry.gain * cos ** (q + 1) / d**2
        np.testing.assert_allclose(h, expected, rtol=1e-12)

    def test_symmetry(self, geometry: GeometryConfig) -> None:
        """Verify the mirror symmetry of the square geometry."""
        h = generate_channel(geometry)
        assert h[0, 0] == h[1, 1]
        assert h[0, 1] == h[1, 0]
        assert h[0, 0] > h[0, 1] > 0

    def test_non_negative_and_finite(self) -> None:
        """Verify gains stay physical over a broad distance range."""
        for d in np.linspace(0.05, 20.0, 40):
            h = generate_channel(GeometryConfig(distance_m=d))
            assert np.all(h >= 0) and np.all(np.isfinite(h))

    def test_direct_gain_monotone_in_distance(self) -> None:
        """Verify the direct path only loses power with distance."""
        distances = np.linspace(0.2, 10.0, 60)
        direct = [generate_channel(GeometryConfig(distance_m=d))[0, 0] for d in distances]
        assert np.all(np.diff(direct) < 0)

    def test_inverse_square_law(self) -> None:
        """Verify boresight paths follow 1/d^2 exactly, cross paths faster."""
        h1 = generate_channel(GeometryConfig(distance_m=4.0))
        h2 = generate_channel(GeometryConfig(distance_m=8.0))
        # The direct path looks straight down the axis at any distance.
        np.testing.assert_allclose(h1[0, 0] / h2[0, 0], 4.0, rtol=1e-12)
        # The cross path also straightens out with distance, so doubling
        # the range costs it slightly less than 1/d^2 would.
        assert 1.0 < h1[0, 1] / h2[0, 1] < 4.0

    def test_crosstalk_floor(self) -> None:
        """Verify the floor lifts weak cross paths but not strong ones."""
        base = generate_channel(GeometryConfig(distance_m=1.0))
        floored = generate_channel(
            GeometryConfig(distance_m=1.0, crosstalk_floor=0.2)
        )
        assert base[0, 1] < 0.2 * base[0, 0]
        np.testing.assert_allclose(floored[0, 1], 0.2 * floored[0, 0])
        np.testing.assert_array_equal(np.diag(floored), np.diag(base))

    def test_invalid_geometry_rejected(self) -> None:
        """Verify parameter validation."""
        with pytest.raises(ValueError):
            generate_channel(GeometryConfig(distance_m=0.0))
        with pytest.raises(ValueError):
            generate_channel(GeometryConfig(lambertian_order=0.5))


class TestApplyChannel:
    """Validate y = Hx + n."""

    def test_noiseless_is_matrix_product(self) -> None:
        """Verify zero noise variance applies H exactly."""
        rng = np.random.default_rng(RNG_SEED_NOISE)
        h = np.array([[1.0, 0.2], [0.3, 0.9]])
        x = rng.normal(size=(2, 50)) + 1j * rng.normal(size=(2, 50))
        np.testing.assert_array_equal(apply_channel(h, x, 0.0, rng), h @ x)

    def test_noise_statistics(self) -> None:
        """Verify total complex noise variance splits evenly across I and Q."""
        rng = np.random.default_rng(RNG_SEED_NOISE)
        h = np.eye(2)
        x = np.zeros((2, NOISE_STAT_SAMPLES), dtype=complex)
        noise_var = 0.04
        y = apply_channel(h, x, noise_var, rng)
        np.testing.assert_allclose(np.var(y.real), noise_var / 2, rtol=0.02)
        np.testing.assert_allclose(np.var(y.imag), noise_var / 2, rtol=0.02)
        np.testing.assert_allclose(np.mean(np.abs(y) ** 2), noise_var, rtol=0.02)

    def test_invalid_inputs_rejected(self) -> None:
        """Verify channel and noise validation."""
        rng = np.random.default_rng(RNG_SEED_NOISE)
        x = np.ones((2, 4), dtype=complex)
        with pytest.raises(ValueError):
            apply_channel(np.array([[1.0, -0.1], [0.0, 1.0]]), x, 0.0, rng)
        with pytest.raises(ValueError):
            apply_channel(np.array([[np.inf, 0.0], [0.0, 1.0]]), x, 0.0, rng)
        with pytest.raises(ValueError):
            apply_channel(np.eye(2), x, -1.0, rng)
        with pytest.raises(ValueError):
            apply_channel(np.eye(2), np.ones((3, 4)), 0.0, rng)


class TestSnrPerStream:
    """Validate eigen-SNRs and the Frobenius aggregate."""

    def test_identity_channel(self) -> None:
        """Verify H=I gives two equal streams at rho and aggregate 2 rho."""
        streams, total = snr_per_stream(np.eye(2), p_total=2.0, noise_var=0.1)
        rho = 2.0 / (2 * 0.1)
        np.testing.assert_allclose(streams, [rho, rho])
        np.testing.assert_allclose(total, 2 * rho)

    def test_rank_one_channel(self) -> None:
        """Verify the all-ones matrix collapses to one stream at 4 rho."""
        h = np.ones((2, 2))
        streams, total = snr_per_stream(h, p_total=2.0, noise_var=0.5)
        rho = 2.0 / (2 * 0.5)
        np.testing.assert_allclose(streams, [4 * rho, 0.0], atol=1e-12)
        np.testing.assert_allclose(total, 4 * rho)

    def test_aggregate_equals_eigen_sum(self) -> None:
        """Verify the Frobenius aggregate equals the eigen-SNR sum."""
        rng = np.random.default_rng(RNG_SEED_NOISE)
        for _ in range(50):
            h = np.abs(rng.normal(size=(2, 2)))
            streams, total = snr_per_stream(h, 2.0, 0.01)
            np.testing.assert_allclose(np.sum(streams), total, rtol=1e-9)

    def test_zero_noise_rejected(self) -> None:
        """Verify noise variance must be positive."""
        with pytest.raises(ValueError):
            snr_per_stream(np.eye(2), 2.0, 0.0)


class TestCalibratedDefault:
    """Validate the packaged gain constant wiring."""

    def test_default_gain_is_calibrated(self, geometry: GeometryConfig) -> None:
        """Verify the default geometry carries the calibrated constant."""
        assert geometry.gain == CALIBRATED_GAIN

    def test_at_distance_preserves_other_fields(self, geometry: GeometryConfig) -> None:
        """Verify at_distance only swaps the axial separation."""
        moved = geometry.at_distance(2.5)
        assert moved.distance_m == 2.5
        assert moved.gain == geometry.gain
        assert moved.noise_var == geometry.noise_var
