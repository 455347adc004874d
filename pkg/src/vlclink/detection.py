"""Symbol detection: zero-forcing for multiplexed streams, MRC for diversity.

Zero forcing inverts the estimated channel (pseudo-inverting when it is
non-square or poorly conditioned), which restores the streams at the cost
of noise enhancement; the per-stream enhancement factors diag(W W^T) are
reported so callers can turn an input SNR into post-detection SNRs. The
diversity combiner treats all transmitters as carrying one symbol, sums
the channel columns into an effective vector and applies maximum-ratio
weights, which is the matched filter for that effective channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COND_LIMIT = 1e8
SV_FLOOR = 1e-12


class OutageError(RuntimeError):
    """Effective channel has no energy; no detection is possible."""


@dataclass
class DetectorOutput:
    """Equalized symbols plus the linear front end that produced them.

    noise_enhancement is dimensionless: post-detection per-stream SNR is
    the per-transmitter input SNR divided by the matching entry.
    """

    symbols: np.ndarray
    weights: np.ndarray
    noise_enhancement: np.ndarray
    rank_deficient: bool = False


def _pinv_floor(h: np.ndarray) -> tuple[np.ndarray, bool]:
    """Moore-Penrose inverse with singular values below the floor zeroed."""
    u, s, vt = np.linalg.svd(h, full_matrices=False)
    keep = s > SV_FLOOR * s[0]
    inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    return (vt.T * inv) @ u.T, bool(np.any(~keep))


def zf_weights(h: np.ndarray) -> tuple[np.ndarray, bool]:
    """Zero-forcing matrix: plain inverse when safe, else floored pinv."""
    h = np.asarray(h, dtype=np.float64)
    if h.shape[0] == h.shape[1]:
        cond = np.linalg.cond(h)  # nan/inf for singular input
        if np.isfinite(cond) and cond < COND_LIMIT:
            return np.linalg.inv(h), False
    return _pinv_floor(h)


def zf_detect(h_hat: np.ndarray, received: np.ndarray) -> DetectorOutput:
    """Equalize multiplexed streams: x_hat = W y.

    Args:
        h_hat: (n_rx, n_tx) channel estimate (or true matrix).
        received: (n_rx, N) observations.
    """
    h_hat = np.asarray(h_hat, dtype=np.float64)
    received = np.atleast_2d(np.asarray(received))
    if received.shape[0] != h_hat.shape[0]:
        raise ValueError(f"expected {h_hat.shape[0]} receive branches, got {received.shape[0]}")
    w, deficient = zf_weights(h_hat)
    return DetectorOutput(
        symbols=w @ received,
        weights=w,
        noise_enhancement=np.sum(w**2, axis=1),
        rank_deficient=deficient,
    )


def effective_channel(h_hat: np.ndarray) -> np.ndarray:
    """Column sum per receiver when all transmitters repeat one symbol."""
    return np.asarray(h_hat, dtype=np.float64).sum(axis=1)


def diversity_combine(h_hat: np.ndarray, received: np.ndarray) -> DetectorOutput:
    """Maximum-ratio combine the repeated symbol across receive branches.

    The combiner output is unbiased (gain exactly one on the effective
    channel) and its noise enhancement is 1 / ||h_eff||^2, the matched
    filter bound for the effective single-input channel.

    Raises:
        OutageError: if the effective channel is all zero.
    """
    received = np.atleast_2d(np.asarray(received))
    h_eff = effective_channel(h_hat)
    if received.shape[0] != h_eff.shape[0]:
        raise ValueError(f"expected {h_eff.shape[0]} receive branches, got {received.shape[0]}")
    gain = float(np.sum(h_eff**2))
    if gain <= 0.0:
        raise OutageError("effective channel has zero energy")
    weights = h_eff / gain
    return DetectorOutput(
        symbols=(weights @ received)[None, :],
        weights=weights[None, :],
        noise_enhancement=np.array([1.0 / gain]),
        rank_deficient=False,
    )
