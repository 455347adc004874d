"""Gray-mapped square QAM constellations and error-vector metrics.

A symbol label is an integer whose upper half of bits selects the in-phase
level and whose lower half selects the quadrature level. Within each axis
the bit groups follow a reflected-binary (Gray) sequence, so points one
grid step apart differ in exactly one label bit. Every constellation is
scaled to unit average symbol energy.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

SUPPORTED_ORDERS = (4, 16, 64, 256)


class QamConstellation:
    """Square M-QAM constellation with per-axis Gray labeling.

    Attributes:
        order: Constellation size M (4, 16, 64 or 256).
        bits_per_symbol: log2(M).
        points: Complex array of length M, indexed by integer label.
    """

    def __init__(self, order: int):
        if order not in SUPPORTED_ORDERS:
            raise ValueError(
                f"unsupported QAM order {order}; expected one of {SUPPORTED_ORDERS}"
            )
        self.order = order
        self.bits_per_symbol = int(np.log2(order))
        self._side = int(round(np.sqrt(order)))
        self._axis_bits = self.bits_per_symbol // 2

        # Gray sequence over level indices; index 0 maps to the most
        # positive amplitude so the all-zeros label lands at (+1, +1)/scale.
        idx = np.arange(self._side)
        self._gray = idx ^ (idx >> 1)
        self._ungray = np.argsort(self._gray)
        self._levels = (self._side - 1) - 2 * idx
        self._scale = float(np.sqrt(2.0 * (self._side**2 - 1) / 3.0))

        labels = np.arange(order)
        i_label = labels >> self._axis_bits
        q_label = labels & (self._side - 1)
        re = self._levels[self._ungray[i_label]]
        im = self._levels[self._ungray[q_label]]
        self.points = (re + 1j * im) / self._scale

    @property
    def scale(self) -> float:
        """Normalization divisor mapping odd integer levels to unit energy."""
        return self._scale

    def map_labels(self, labels) -> np.ndarray:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.size and (labels.min() < 0 or labels.max() >= self.order):
            raise ValueError(f"labels out of range for order {self.order}")
        return self.points[labels]

    def map_bits(self, bits) -> np.ndarray:
        """Map a flat 0/1 sequence to symbols, most significant bit first.

        Raises:
            ValueError: if the bit count is not a multiple of log2(M).
        """
        bits = np.asarray(bits, dtype=np.int64).ravel()
        k = self.bits_per_symbol
        if bits.size % k != 0:
            raise ValueError(f"bit count {bits.size} is not a multiple of {k}")
        weights = 1 << np.arange(k - 1, -1, -1)
        labels = bits.reshape(-1, k) @ weights
        return self.points[labels]

    def _demap_axis(self, x: np.ndarray) -> np.ndarray:
        # Levels descend with index, so u is a fractional level index.
        side = self._side
        u = ((side - 1) - x) / 2.0
        v_lo = np.clip(np.floor(u), 0, side - 1).astype(np.int64)
        v_hi = np.clip(np.ceil(u), 0, side - 1).astype(np.int64)
        d_lo = np.abs(x - ((side - 1) - 2 * v_lo))
        d_hi = np.abs(x - ((side - 1) - 2 * v_hi))
        lab_lo = self._gray[v_lo]
        lab_hi = self._gray[v_hi]
        # Exact distance ties resolve to the numerically smaller label.
        take_lo = (d_lo < d_hi) | ((d_lo == d_hi) & (lab_lo <= lab_hi))
        return np.where(take_lo, lab_lo, lab_hi)

    def demap_labels(self, received) -> np.ndarray:
        """Nearest-point labels for arbitrary complex input.

        The decision is separable per axis for a square grid, which keeps the
        cost O(N) regardless of constellation size.
        """
        r = np.asarray(received, dtype=np.complex128) * self._scale
        i_label = self._demap_axis(r.real)
        q_label = self._demap_axis(r.imag)
        return (i_label << self._axis_bits) | q_label

    def demap_bits(self, received) -> np.ndarray:
        labels = self.demap_labels(received)
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return ((labels[..., None] >> shifts) & 1).ravel().astype(np.int64)


@lru_cache(maxsize=None)
def build_constellation(order: int) -> QamConstellation:
    """Return the shared constellation instance for the given order."""
    return QamConstellation(order)


def map_bits(bits, order: int) -> np.ndarray:
    """Map a bit sequence onto unit-energy Gray-labeled M-QAM symbols."""
    return build_constellation(order).map_bits(bits)


def demap_symbols(symbols, order: int) -> np.ndarray:
    """Hard-decide symbols back to bits by nearest constellation point."""
    return build_constellation(order).demap_bits(symbols)


def compute_evm(received, reference) -> float:
    """Root-mean-square error vector magnitude.

    EVM = sqrt(mean|r - s|^2 / mean|s|^2) over matching sample vectors.
    For additive white noise at symbol SNR gamma this approaches
    1/sqrt(gamma), which is the basis of the EVM-based SNR estimate.
    """
    r = np.asarray(received, dtype=np.complex128).ravel()
    s = np.asarray(reference, dtype=np.complex128).ravel()
    if r.size == 0:
        raise ValueError("EVM of empty input is undefined")
    if r.shape != s.shape:
        raise ValueError(f"shape mismatch: {r.shape} vs {s.shape}")
    ref_power = np.mean(np.abs(s) ** 2)
    if ref_power == 0.0:
        raise ValueError("reference power is zero")
    return float(np.sqrt(np.mean(np.abs(r - s) ** 2) / ref_power))
