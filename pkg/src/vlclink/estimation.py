"""Least-squares channel estimation from time-orthogonal training.

Because only one transmitter is active per training slot, each channel
entry is estimated independently by projecting the slot observation onto
the known sequence:

    h_hat[n, m] = <y_n(slot m), ts_m> / <ts_m, ts_m>

The physical gains are real and non-negative, so the estimate keeps the
real part; whatever lands in the imaginary part is noise and is folded
into the per-entry residual variance that accompanies the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ChannelEstimate:
    """LS estimate plus quality figures for one frame."""

    h_hat: np.ndarray
    residual_var: np.ndarray
    eigenvalues: np.ndarray = field(default=None)  # of h_hat h_hat^T, descending
    frame_index: int = 0

    def __post_init__(self):
        if self.eigenvalues is None:
            eig = np.linalg.eigvalsh(self.h_hat @ self.h_hat.T)[::-1]
            self.eigenvalues = np.clip(eig, 0.0, None)


def estimate_channel(training_obs: np.ndarray, training: np.ndarray, frame_index: int = 0) -> ChannelEstimate:
    """Estimate the channel matrix from per-slot observations.

    Args:
        training_obs: (n_rx, n_tx, l_ts) received samples; [:, m] is what
            each receiver saw while transmitter m was sending its sequence.
        training: (n_tx, l_ts) known transmitted sequences.
        frame_index: carried through for the feedback loop bookkeeping.

    Returns:
        ChannelEstimate with h_hat of shape (n_rx, n_tx).

    Raises:
        ValueError: on shape mismatch or an all-zero training sequence.
    """
    obs = np.asarray(training_obs, dtype=np.complex128)
    ts = np.asarray(training, dtype=np.float64)
    if obs.ndim != 3 or ts.ndim != 2 or obs.shape[1:] != ts.shape:
        raise ValueError(f"observation shape {obs.shape} does not match training {ts.shape}")
    energy = np.sum(ts**2, axis=1)
    if np.any(energy <= 0):
        raise ValueError("training sequence with zero energy")
    # <y, ts> / <ts, ts> per entry; einsum keeps it one pass over the data.
    proj = np.einsum("rmt,mt->rm", obs, ts) / energy[None, :]
    h_hat = proj.real
    residual = obs - h_hat[:, :, None] * ts[None, :, :]
    residual_var = np.mean(np.abs(residual) ** 2, axis=2)
    return ChannelEstimate(h_hat=h_hat, residual_var=residual_var, frame_index=frame_index)


def eigen_snrs(est: ChannelEstimate, p_total: float, noise_var: float) -> tuple[np.ndarray, float]:
    """Operating SNRs implied by an estimate.

    Returns (per_stream, combined): per_stream holds rho * lambda_i with
    lambda_i the eigenvalues of h_hat h_hat^T and rho = p_total /
    (n_tx * noise_var); combined is the diversity SNR
    (p_total / n_tx) * ||sum_m h_col_m||^2 / noise_var obtained when all
    transmitters carry the same symbol and the receiver combines branches.
    """
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    n_tx = est.h_hat.shape[1]
    rho = p_total / (n_tx * noise_var)
    h_eff = est.h_hat.sum(axis=1)
    return rho * est.eigenvalues, float(rho * np.sum(h_eff**2))


def snr_from_evm(evm: float) -> float:
    """SNR estimate from an error vector magnitude: gamma ~= 1 / EVM^2.

    Valid once the error vector is dominated by noise rather than by the
    measurement itself; the approximation tightens as the sample count
    grows.

    Raises:
        ValueError: for evm <= 0 (a zero EVM means the measurement
            saturated; there is no finite SNR to report).
    """
    if evm <= 0:
        raise ValueError("EVM is zero or negative: SNR estimate saturated")
    return 1.0 / (evm * evm)
