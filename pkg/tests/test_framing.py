"""Tests for frame layout, time-orthogonal training, and cyclic prefix."""

import json

import numpy as np
import pytest

from vlclink.framing import (
    FrameLayout,
    MalformedFrameError,
    TrainingConfig,
    add_cyclic_prefix,
    build_frame,
    generate_training,
    parse_frame,
    remove_cyclic_prefix,
    training_region,
)

DEFAULT_FRAME_LENGTH = 656
RNG_SEED_PAYLOAD = 11


@pytest.fixture
def layout() -> FrameLayout:
    """Provide the default frame layout."""
    return FrameLayout()


@pytest.fixture
def training(layout: FrameLayout) -> np.ndarray:
    """Provide the default per-transmitter training sequences."""
    return generate_training(layout.training_config())


class TestTraining:
    """Validate pilot generation and the slotted training region."""

    def test_shape_and_levels(self, training: np.ndarray) -> None:
        """Verify pilots are (n_tx, l_ts) bipolar sequences."""
        assert training.shape == (2, 64)
        np.testing.assert_array_equal(np.unique(training), [-1.0, 1.0])

    def test_seed_determinism(self, layout: FrameLayout) -> None:
        """Verify identical seeds give identical pilots, distinct seeds differ."""
        a = generate_training(layout.training_config())
        b = generate_training(layout.training_config())
        np.testing.assert_array_equal(a, b)
        other = generate_training(TrainingConfig(seed=layout.seed + 1))
        assert not np.array_equal(a, other)

    def test_amplitude_scaling(self, layout: FrameLayout) -> None:
        """Verify the amplitude parameter scales pilot magnitude."""
        scaled = generate_training(layout.training_config(amplitude=0.5))
        np.testing.assert_allclose(np.abs(scaled), 0.5)

    def test_region_is_slot_orthogonal(self, training: np.ndarray) -> None:
        """Verify transmitters are silent outside their own slot."""
        region = training_region(training)
        assert region.shape == (2, 128)
        np.testing.assert_array_equal(region[0, :64], training[0])
        np.testing.assert_array_equal(region[0, 64:], 0.0)
        np.testing.assert_array_equal(region[1, :64], 0.0)
        np.testing.assert_array_equal(region[1, 64:], training[1])
        # Orthogonality in time: the two rows never overlap.
        np.testing.assert_array_equal(region[0] * region[1], 0.0)


class TestCyclicPrefix:
    """Validate cyclic prefix insertion and removal."""

    def test_prefix_copies_tail(self) -> None:
        """Verify the prefix replicates the block tail."""
        block = np.arange(8).astype(complex)
        out = add_cyclic_prefix(block, 3)
        np.testing.assert_array_equal(out[:3], block[-3:])
        np.testing.assert_array_equal(out[3:], block)

    def test_roundtrip(self) -> None:
        """Verify removal inverts insertion block by block."""
        rng = np.random.default_rng(RNG_SEED_PAYLOAD)
        blocks = rng.normal(size=(3, 16)).astype(complex)
        for block in blocks:
            unit = add_cyclic_prefix(block, 4)
            np.testing.assert_array_equal(remove_cyclic_prefix(unit, 16, 4), block)

    def test_zero_length_prefix(self) -> None:
        """Verify cp=0 is the identity."""
        block = np.arange(5).astype(complex)
        np.testing.assert_array_equal(add_cyclic_prefix(block, 0), block)
        np.testing.assert_array_equal(remove_cyclic_prefix(block, 5, 0), block)

    def test_invalid_lengths_rejected(self) -> None:
        """Verify prefix bounds are enforced."""
        with pytest.raises(ValueError):
            add_cyclic_prefix(np.ones(5), 8)
        with pytest.raises(ValueError):
            add_cyclic_prefix(np.ones(5), -1)

    def test_partial_block_rejected(self) -> None:
        """Verify streams that are not whole CP+block units are rejected."""
        with pytest.raises(MalformedFrameError):
            remove_cyclic_prefix(np.ones(10), 256, 8)


class TestFrameLayout:
    """Validate layout arithmetic and serialization."""

    def test_frame_length(self, layout: FrameLayout) -> None:
        """Verify frame length counts training slots plus CP+block units."""
        assert layout.frame_length(2) == DEFAULT_FRAME_LENGTH
        assert layout.frame_length(2) == 2 * 64 + 2 * (256 + 8)
        assert layout.frame_length(5) == 2 * 64 + 5 * (256 + 8)

    def test_json_fields(self, layout: FrameLayout) -> None:
        """Verify the JSON form carries exactly the five layout integers."""
        doc = json.loads(layout.to_json())
        assert doc == {"l_ts": 64, "block": 256, "cp": 8, "n_tx": 2, "seed": 2025}


class TestFrameRoundtrip:
    """Validate frame assembly and parsing."""

    @pytest.fixture
    def payload(self) -> np.ndarray:
        """Provide a two-stream payload filling two blocks."""
        rng = np.random.default_rng(RNG_SEED_PAYLOAD)
        return (rng.normal(size=(2, 512)) + 1j * rng.normal(size=(2, 512)))

    def test_roundtrip(
        self, layout: FrameLayout, training: np.ndarray, payload: np.ndarray
    ) -> None:
        """Verify parse inverts build over an identity channel."""
        frame = build_frame(payload, training, layout)
        assert frame.shape == (2, DEFAULT_FRAME_LENGTH)
        obs, recovered = parse_frame(frame, layout)
        np.testing.assert_allclose(recovered, payload)
        # Through an identity channel, receiver n hears transmitter m's
        # pilot only during slot m, and silence in the other slot.
        assert obs.shape == (2, 2, 64)
        np.testing.assert_array_equal(obs[0, 0], training[0])
        np.testing.assert_array_equal(obs[1, 1], training[1])
        np.testing.assert_array_equal(obs[0, 1], 0.0)
        np.testing.assert_array_equal(obs[1, 0], 0.0)

    def test_frame_starts_with_training(
        self, layout: FrameLayout, training: np.ndarray, payload: np.ndarray
    ) -> None:
        """Verify the leading samples equal the slotted training region."""
        frame = build_frame(payload, training, layout)
        np.testing.assert_array_equal(frame[:, :128], training_region(training))

    def test_bad_payload_shape_rejected(
        self, layout: FrameLayout, training: np.ndarray
    ) -> None:
        """Verify payloads that do not fill whole blocks are rejected."""
        with pytest.raises(ValueError):
            build_frame(np.ones((2, 500), dtype=complex), training, layout)

    def test_malformed_inputs_rejected(self, layout: FrameLayout) -> None:
        """Verify parse reports truncated or misaligned streams."""
        with pytest.raises(MalformedFrameError):
            parse_frame(np.ones((2, 10)), layout)
        with pytest.raises(MalformedFrameError):
            parse_frame(np.ones((2, 657)), layout)
