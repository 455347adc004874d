"""Frame assembly: time-orthogonal training, cyclic prefix, block layout.

A frame per transmit branch is

    [ training region | CP+block | CP+block | ... ]

where the training region is divided into one slot per transmitter and
only transmitter j is active during slot j, so the pilot observations of
different transmitters never overlap in time. The cyclic prefix is purely
structural here (the channel is frequency-flat); it is carried and
stripped but never used for equalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np


class MalformedFrameError(ValueError):
    """Received symbol stream does not fit the declared frame layout."""


@dataclass(frozen=True)
class TrainingConfig:
    """Per-transmitter BPSK training definition.

    Attributes:
        length: symbols per training slot.
        n_tx: number of transmit branches (one slot each).
        seed: RNG seed; the same seed always yields the same sequences.
        amplitude: training amplitude, kept equal to the payload RMS so
            the pilot SNR matches the data SNR.
    """

    length: int = 64
    n_tx: int = 2
    seed: int = 2025
    amplitude: float = 1.0


@dataclass(frozen=True)
class FrameLayout:
    """Structural frame description shared by transmitter and receiver."""

    l_ts: int = 64
    block: int = 256
    cp: int = 8
    n_tx: int = 2
    seed: int = 2025

    def training_config(self, amplitude: float = 1.0) -> TrainingConfig:
        return TrainingConfig(
            length=self.l_ts, n_tx=self.n_tx, seed=self.seed, amplitude=amplitude
        )

    def frame_length(self, n_blocks: int) -> int:
        return self.n_tx * self.l_ts + n_blocks * (self.block + self.cp)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FrameLayout":
        fields = json.loads(text)
        return cls(**{k: int(fields[k]) for k in ("l_ts", "block", "cp", "n_tx", "seed")})


def generate_training(cfg: TrainingConfig) -> np.ndarray:
    """Deterministic +/-amplitude BPSK training, one row per transmitter."""
    if cfg.length <= 0 or cfg.n_tx <= 0:
        raise ValueError("training length and n_tx must be positive")
    rng = np.random.default_rng(cfg.seed)
    bits = rng.integers(0, 2, size=(cfg.n_tx, cfg.length))
    return cfg.amplitude * (2.0 * bits - 1.0)


def training_region(training: np.ndarray) -> np.ndarray:
    """Embed per-transmitter sequences into the time-orthogonal region.

    Slot j carries training row j on transmitter j and zeros elsewhere,
    giving a block-diagonal (n_tx, n_tx*length) matrix.
    """
    n_tx, length = training.shape
    region = np.zeros((n_tx, n_tx * length), dtype=training.dtype)
    for j in range(n_tx):
        region[j, j * length : (j + 1) * length] = training[j]
    return region


def add_cyclic_prefix(block: np.ndarray, cp: int) -> np.ndarray:
    """Prepend the last `cp` symbols of each block (along the last axis)."""
    if cp < 0:
        raise ValueError("cyclic prefix length must be non-negative")
    if cp > block.shape[-1]:
        raise ValueError("cyclic prefix longer than the block")
    if cp == 0:
        return block.copy()
    return np.concatenate([block[..., -cp:], block], axis=-1)


def remove_cyclic_prefix(seq: np.ndarray, block: int, cp: int) -> np.ndarray:
    """Strip the prefix, returning the trailing `block` symbols."""
    if seq.shape[-1] != block + cp:
        raise MalformedFrameError(
            f"expected {block + cp} symbols (block {block} + cp {cp}), got {seq.shape[-1]}"
        )
    return seq[..., cp:]


def build_frame(payload: np.ndarray, training: np.ndarray, layout: FrameLayout) -> np.ndarray:
    """Assemble per-transmitter frames from payload symbols.

    Args:
        payload: (n_tx, S) symbols with S a multiple of layout.block.
        training: (n_tx, l_ts) sequences from generate_training.
        layout: structural frame description.

    Returns:
        (n_tx, frame_length) array.
    """
    payload = np.atleast_2d(np.asarray(payload))
    if payload.shape[0] != layout.n_tx:
        raise ValueError(f"payload has {payload.shape[0]} branches, layout expects {layout.n_tx}")
    if training.shape != (layout.n_tx, layout.l_ts):
        raise ValueError("training shape does not match the layout")
    n_sym = payload.shape[1]
    if n_sym == 0 or n_sym % layout.block != 0:
        raise ValueError(f"payload length {n_sym} is not a positive multiple of {layout.block}")
    n_blocks = n_sym // layout.block
    blocks = payload.reshape(layout.n_tx, n_blocks, layout.block)
    with_cp = add_cyclic_prefix(blocks, layout.cp)
    body = with_cp.reshape(layout.n_tx, n_blocks * (layout.block + layout.cp))
    region = training_region(training).astype(body.dtype)
    return np.concatenate([region, body], axis=1)


def parse_frame(received: np.ndarray, layout: FrameLayout) -> tuple[np.ndarray, np.ndarray]:
    """Split received streams into training observations and payload.

    Args:
        received: (n_rx, frame_length) symbol streams.
        layout: the layout the frame was built with.

    Returns:
        (training_obs, payload): training_obs has shape (n_rx, n_tx, l_ts)
        where [:, m] is what each receiver saw during transmitter m's slot;
        payload has shape (n_rx, n_blocks * block) with prefixes stripped.

    Raises:
        MalformedFrameError: if the stream length does not fit the layout.
    """
    received = np.atleast_2d(np.asarray(received))
    n_rx, total = received.shape
    head = layout.n_tx * layout.l_ts
    if total < head:
        raise MalformedFrameError(f"stream of {total} symbols is shorter than the training region")
    body = total - head
    unit = layout.block + layout.cp
    if body % unit != 0:
        raise MalformedFrameError(
            f"payload section of {body} symbols is not a multiple of block+cp={unit}"
        )
    n_blocks = body // unit
    training_obs = received[:, :head].reshape(n_rx, layout.n_tx, layout.l_ts)
    blocks = received[:, head:].reshape(n_rx, n_blocks, unit)
    payload = remove_cyclic_prefix(blocks, layout.block, layout.cp)
    return training_obs, payload.reshape(n_rx, n_blocks * layout.block)
