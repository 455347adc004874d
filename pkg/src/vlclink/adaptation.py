"""Adaptive mode control for the 2x2 optical MIMO link.

Eight transmission modes pair a MIMO scheme with a QAM order:
spatial multiplexing (SM, independent streams, full rate) or spatial
diversity (SD, repeated symbol, combining gain) times {4, 16, 64, 256}.
A mode is encoded in three bits for the feedback channel: bit 2 selects
the scheme (0 = SM, 1 = SD) and bits 1..0 index the order.

Feasibility is threshold-based. The closed-form Gray-QAM error rate

    P_b(M, g) = 2 (sqrt(M)-1) / (sqrt(M) log2 M) * erfc(sqrt(3 g / (2(M-1))))

is inverted once per target BER to get the minimum workable SNR per
order; SM modes must clear it on their weakest post-equalization stream,
SD modes on the combined SNR. Among the feasible modes the controller
picks the highest spectral efficiency, preferring diversity on ties, and
a two-frame hysteresis keeps estimation noise from toggling modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from vlclink.detection import effective_channel, zf_weights
from vlclink.estimation import ChannelEstimate

MOD_ORDERS = (4, 16, 64, 256)
SCHEME_SM = "sm"
SCHEME_SD = "sd"
FEEDBACK_OUTAGE_BIT = 0x80


@dataclass(frozen=True)
class ModeCode:
    """One entry of the adaptive mode table."""

    scheme: str
    order: int

    def __post_init__(self):
        if self.scheme not in (SCHEME_SM, SCHEME_SD):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.order not in MOD_ORDERS:
            raise ValueError(f"unsupported order {self.order}")

    @property
    def name(self) -> str:
        return f"{self.scheme}{self.order}"

    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))

    def spectral_efficiency(self, n_tx: int = 2) -> float:
        """Bits per channel use: multiplexing scales with n_tx, diversity not."""
        k = self.bits_per_symbol()
        return float(n_tx * k) if self.scheme == SCHEME_SM else float(k)

    def encode(self) -> int:
        return (4 if self.scheme == SCHEME_SD else 0) | MOD_ORDERS.index(self.order)

    @classmethod
    def decode(cls, value: int) -> "ModeCode":
        if not 0 <= value <= 7:
            raise ValueError(f"mode code {value} out of range")
        return cls(SCHEME_SD if value & 4 else SCHEME_SM, MOD_ORDERS[value & 3])

    @classmethod
    def from_name(cls, name: str) -> "ModeCode":
        name = name.lower()
        for scheme in (SCHEME_SM, SCHEME_SD):
            if name.startswith(scheme):
                return cls(scheme, int(name[len(scheme) :]))
        raise ValueError(f"unknown mode name {name!r}")


ALL_MODES = tuple(
    ModeCode(scheme, order) for scheme in (SCHEME_SM, SCHEME_SD) for order in MOD_ORDERS
)


@dataclass(frozen=True)
class AdaptPolicy:
    """Targets and constraints for mode selection.

    p_total is the total transmit power, shared equally across active
    transmitters. fallback is what the transmitter keeps sending while
    the link is in outage so the receiver can still train and recover.
    """

    ber_target: float = 1e-3
    p_total: float = 2.0
    modes: tuple[ModeCode, ...] = ALL_MODES
    fallback: ModeCode = ModeCode(SCHEME_SD, 4)


def predict_ber(order: int, snr):
    """Closed-form Gray-coded square M-QAM bit error rate (per stream)."""
    if order not in MOD_ORDERS:
        raise ValueError(f"unsupported order {order}")
    snr = np.asarray(snr, dtype=np.float64)
    if np.any(snr < 0):
        raise ValueError("SNR must be non-negative")
    root_m = math.sqrt(order)
    prefactor = 2.0 * (root_m - 1.0) / (root_m * math.log2(order))
    out = prefactor * erfc(np.sqrt(3.0 * snr / (2.0 * (order - 1.0))))
    return float(out) if out.ndim == 0 else out


def ber_bound(order: int, snr):
    """Exponential BER bound (1/5) exp(-1.5 g / (M-1)).

    An upper bound on predict_ber only in the operating region (error
    rates of about 1e-2 and below); at very low SNR the closed form
    saturates above 0.2 and the exponential no longer dominates.
    """
    if order not in MOD_ORDERS:
        raise ValueError(f"unsupported order {order}")
    snr = np.asarray(snr, dtype=np.float64)
    out = 0.2 * np.exp(-1.5 * snr / (order - 1.0))
    return float(out) if out.ndim == 0 else out


def max_spectral_efficiency(snr, ber_target: float = 1e-3):
    """Continuous-rate ceiling s = log2(1 + K g), K = -3 / (2 ln(5 BER)).

    Obtained by inverting the exponential bound at the target BER; the
    discrete mode table stays below this curve.
    """
    if not 0.0 < ber_target < 0.2:
        raise ValueError("BER target must lie in (0, 0.2)")
    k = -3.0 / (2.0 * math.log(5.0 * ber_target))
    snr = np.asarray(snr, dtype=np.float64)
    out = np.log2(1.0 + k * snr)
    return float(out) if out.ndim == 0 else out


def mimo_spectral_efficiency(h: np.ndarray, rho: float) -> float:
    """Open-loop MIMO capacity log2 det(I + rho H H^T) in b/s/Hz.

    The determinant form and the eigenvalue sum are computed side by side
    as a numerical cross-check. The fully-combined single-stream rate
    log2(1 + rho ||H||_F^2) is a floor: pooling all channel energy into
    one eigenmode is the rank-one worst case, so the capacity never drops
    below it (equality exactly when H has rank one).
    """
    h = np.asarray(h, dtype=np.float64)
    if rho < 0:
        raise ValueError("rho must be non-negative")
    gram = h @ h.T
    det_form = float(np.log2(np.linalg.det(np.eye(gram.shape[0]) + rho * gram)))
    eig = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
    eig_form = float(np.sum(np.log2(1.0 + rho * eig)))
    if not math.isclose(det_form, eig_form, rel_tol=1e-9, abs_tol=1e-12):
        raise ArithmeticError(
            f"capacity forms disagree: det {det_form!r} vs eigen {eig_form!r}"
        )
    return det_form


@lru_cache(maxsize=None)
def mode_threshold_table(ber_target: float = 1e-3) -> dict[int, float]:
    """Minimum SNR per order that meets the target BER (root-solved)."""
    if not 0.0 < ber_target < 0.2:
        raise ValueError("BER target must lie in (0, 0.2)")
    table = {}
    for order in MOD_ORDERS:
        table[order] = brentq(
            lambda g: predict_ber(order, g) - ber_target,
            1e-12,
            1e9,
            xtol=1e-12,
            rtol=1e-12,
        )
    return table


def snr_threshold(order: int, ber_target: float = 1e-3) -> float:
    if order not in MOD_ORDERS:
        raise ValueError(f"unsupported order {order}")
    return mode_threshold_table(ber_target)[order]


def operating_snrs(est: ChannelEstimate, p_total: float, noise_var: float) -> tuple[np.ndarray, float]:
    """Post-detection SNRs the selector works with.

    SM streams: per-transmitter SNR divided by the zero-forcing noise
    enhancement of the estimated channel (not the raw eigen-SNRs, which
    ignore the equalizer's noise cost). SD: combined SNR of the effective
    channel after maximum-ratio combining.
    """
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    n_tx = est.h_hat.shape[1]
    rho = p_total / (n_tx * noise_var)
    weights, deficient = zf_weights(est.h_hat)
    if deficient:
        # The pseudo-inverse of a rank-deficient channel projects instead
        # of separating, so the streams drown in each other regardless of
        # the noise floor: no SM mode is workable.
        sm = np.zeros(n_tx)
    else:
        enhancement = np.sum(weights**2, axis=1)
        sm = rho / enhancement
    h_eff = effective_channel(est.h_hat)
    sd = float(rho * np.sum(h_eff**2))
    return sm, sd


def select_mode(est: ChannelEstimate, policy: AdaptPolicy, noise_var: float) -> ModeCode | None:
    """Highest-rate feasible mode, or None for outage.

    SM-M is feasible when the weakest post-ZF stream clears the order's
    SNR threshold, SD-M when the combined SNR does. Ties in spectral
    efficiency go to the diversity mode (same rate, more margin).
    """
    sm_snrs, sd_snr = operating_snrs(est, policy.p_total, noise_var)
    sm_floor = float(np.min(sm_snrs))
    n_tx = est.h_hat.shape[1]
    best = None
    best_se = -1.0
    for mode in policy.modes:
        threshold = snr_threshold(mode.order, policy.ber_target)
        snr = sm_floor if mode.scheme == SCHEME_SM else sd_snr
        if snr < threshold:
            continue
        se = mode.spectral_efficiency(n_tx)
        if se > best_se or (se == best_se and mode.scheme == SCHEME_SD and best.scheme == SCHEME_SM):
            best, best_se = mode, se
    return best


class ModeController:
    """Hysteresis wrapper around select_mode decisions.

    A change of mode (including into or out of outage, represented as
    None) is applied only after the same proposal has won `dwell`
    consecutive frames.
    """

    def __init__(self, initial: ModeCode, dwell: int = 2):
        if dwell < 1:
            raise ValueError("dwell must be at least 1")
        self.mode: ModeCode | None = initial
        self.dwell = dwell
        self._pending: ModeCode | None = None
        self._count = 0

    def update(self, proposal: ModeCode | None) -> ModeCode | None:
        """Feed one frame's proposal; returns the mode to apply next."""
        if proposal == self.mode:
            self._pending = None
            self._count = 0
            return self.mode
        if proposal == self._pending:
            self._count += 1
        else:
            self._pending = proposal
            self._count = 1
        if self._count >= self.dwell:
            self.mode = proposal
            self._pending = None
            self._count = 0
        return self.mode


def encode_feedback(mode: ModeCode | None) -> int:
    """One-byte feedback word: low 3 bits mode, bit 7 set for outage."""
    if mode is None:
        return FEEDBACK_OUTAGE_BIT
    return mode.encode()


def decode_feedback(byte: int) -> ModeCode | None:
    if not 0 <= byte <= 0xFF:
        raise ValueError(f"feedback byte {byte} out of range")
    if byte & FEEDBACK_OUTAGE_BIT:
        return None
    return ModeCode.decode(byte & 0x7)
