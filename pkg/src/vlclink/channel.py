"""Line-of-sight optical MIMO channel: Lambertian gains plus AWGN.

Transmit and receive arrays are parallel, facing each other across the
link distance, with elements spread laterally and symmetrically about the
optical axis. Every entry of the channel matrix is a non-negative real DC
gain

    h[n, m] = gain * cos^q(phi) * cos(psi) / d_nm^2

with q the Lambertian order, phi the departure angle at transmitter m,
psi the arrival angle at receiver n and d_nm the element distance. An
optional crosstalk floor raises each off-diagonal entry to at least
kappa times the corresponding direct gain, which models residual scatter
that geometry alone would not produce.

Receiver noise is signal-independent additive white Gaussian noise with a
total complex variance per branch, applied at (complex) baseband.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# Default gain constant; calibrated so a fixed 64-QAM spatial-multiplexing
# link with the default geometry and noise crosses BER 1e-3 at 1.7 m.
# Recompute with vlclink.link.calibrate after changing the geometry.
CALIBRATED_GAIN = 3.877099165817e-02
DEFAULT_NOISE_VAR = 1e-6


@dataclass(frozen=True)
class GeometryConfig:
    """Desk-scale rectangular link geometry.

    distance_m: separation of the array planes along the optical axis.
    tx_spacing_m / rx_spacing_m: lateral element pitch.
    lambertian_order: beam concentration q (>= 1); large values model
        collimating optics that keep the cross paths weak at short range.
    gain: the DC gain constant in h = gain cos^q(phi) cos(psi) / d^2.
    crosstalk_floor: kappa in h_cross >= kappa * h_direct (square arrays).
    noise_var: total complex AWGN variance per receive branch.
    """

    distance_m: float = 1.0
    tx_spacing_m: float = 1.0
    rx_spacing_m: float = 1.0
    lambertian_order: float = 25.0
    gain: float = CALIBRATED_GAIN
    crosstalk_floor: float = 0.0
    noise_var: float = DEFAULT_NOISE_VAR
    n_tx: int = 2
    n_rx: int = 2

    def at_distance(self, distance_m: float) -> "GeometryConfig":
        return replace(self, distance_m=distance_m)


def generate_channel(geo: GeometryConfig) -> np.ndarray:
    """Channel matrix (n_rx, n_tx) of non-negative real gains."""
    if geo.distance_m <= 0:
        raise ValueError("link distance must be positive")
    if geo.lambertian_order < 1:
        raise ValueError("Lambertian order must be >= 1")
    tx_x = (np.arange(geo.n_tx) - (geo.n_tx - 1) / 2.0) * geo.tx_spacing_m
    rx_x = (np.arange(geo.n_rx) - (geo.n_rx - 1) / 2.0) * geo.rx_spacing_m
    dx = rx_x[:, None] - tx_x[None, :]
    d = np.hypot(geo.distance_m, dx)
    cos_angle = geo.distance_m / d
    h = geo.gain * cos_angle ** (geo.lambertian_order + 1) / d**2
    if geo.crosstalk_floor > 0 and geo.n_tx == geo.n_rx:
        direct = np.diag(h).copy()
        floor = geo.crosstalk_floor * direct[:, None] * np.ones_like(h)
        np.fill_diagonal(floor, 0.0)
        h = np.maximum(h, floor)
    return h


def apply_channel(h: np.ndarray, tx: np.ndarray, noise_var: float, rng) -> np.ndarray:
    """y = H x + n, with complex AWGN of total variance noise_var per branch.

    Args:
        h: (n_rx, n_tx) real non-negative channel matrix.
        tx: (n_tx, N) transmitted samples or symbols.
        noise_var: total complex noise variance (split evenly I/Q).
        rng: numpy Generator; pass a dedicated stream for reproducibility.
    """
    h = np.asarray(h, dtype=np.float64)
    if np.any(h < 0) or not np.all(np.isfinite(h)):
        raise ValueError("channel gains must be finite and non-negative")
    if noise_var < 0:
        raise ValueError("noise variance must be non-negative")
    tx = np.atleast_2d(np.asarray(tx))
    if tx.shape[0] != h.shape[1]:
        raise ValueError(f"channel expects {h.shape[1]} inputs, got {tx.shape[0]}")
    y = h @ tx
    if noise_var > 0:
        scale = np.sqrt(noise_var / 2.0)
        y = y + scale * (
            rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        )
    return y


def snr_per_stream(h: np.ndarray, p_total: float, noise_var: float) -> tuple[np.ndarray, float]:
    """Eigen-SNRs of the spatial streams plus the Frobenius aggregate.

    With rho = p_total / (n_tx * noise_var), the per-stream SNRs are
    rho * eig(H H^T) in descending order and the aggregate is
    rho * ||H||_F^2, which equals the eigen sum.
    """
    h = np.asarray(h, dtype=np.float64)
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    rho = p_total / (h.shape[1] * noise_var)
    eig = np.linalg.eigvalsh(h @ h.T)[::-1]
    eig = np.clip(eig, 0.0, None)
    return rho * eig, float(rho * np.sum(h**2))
