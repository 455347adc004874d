"""Link quality bookkeeping: error counts, reports, aggregation, CSV.

Spectral efficiency follows the error-free convention: a mode only
counts its rate when the measured BER stays at or below the policy
target; otherwise (or in outage) the achieved efficiency is zero.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from vlclink.adaptation import AdaptPolicy, ModeCode

CSV_FIELDS = (
    "distance_m",
    "snr_db",
    "mode",
    "scheme",
    "qam_order",
    "ber",
    "evm",
    "spec_eff",
    "outage",
)


def count_bit_errors(tx_bits, rx_bits) -> int:
    """Hamming distance between two equal-length bit arrays."""
    tx = np.asarray(tx_bits).ravel()
    rx = np.asarray(rx_bits).ravel()
    if tx.shape != rx.shape:
        raise ValueError(f"bit streams differ in length: {tx.size} vs {rx.size}")
    return int(np.count_nonzero(tx != rx))


def achieved_spectral_efficiency(
    mode: ModeCode | None, ber: float, policy: AdaptPolicy, n_tx: int = 2
) -> float:
    """Error-free spectral efficiency of one measurement."""
    if mode is None:
        return 0.0
    if ber > policy.ber_target:
        return 0.0
    return mode.spectral_efficiency(n_tx)


@dataclass
class LinkReport:
    """Outcome of one link run (one sweep point, several frames)."""

    ber: float
    evm: float
    spectral_efficiency: float
    outage: bool
    mode: str
    mode_trace: list[str] = field(default_factory=list)
    dwell_counts: dict[str, int] = field(default_factory=dict)
    snr_per_stream: list[float] = field(default_factory=list)
    snr_combined: float = 0.0
    total_bits: int = 0
    bit_errors: int = 0
    frames: int = 0
    frames_lost: int = 0
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LinkReport":
        return cls(**json.loads(text))


def aggregate_reports(reports: list[LinkReport]) -> dict:
    """Mean figures with 95% normal-approximation confidence intervals.

    The BER interval uses the pooled binomial standard error
    sqrt(p (1 - p) / n) over the total bit count; EVM and spectral
    efficiency use the sample standard error across reports.
    """
    if not reports:
        raise ValueError("no reports to aggregate")
    z = 1.959963984540054  # two-sided 95%
    total_bits = sum(r.total_bits for r in reports)
    total_errors = sum(r.bit_errors for r in reports)
    p = total_errors / total_bits if total_bits else 0.0
    ber_se = math.sqrt(p * (1.0 - p) / total_bits) if total_bits else 0.0

    def mean_ci(values):
        arr = np.asarray(values, dtype=np.float64)
        mean = float(arr.mean())
        if arr.size < 2:
            return mean, 0.0
        return mean, float(z * arr.std(ddof=1) / math.sqrt(arr.size))

    evm_mean, evm_ci = mean_ci([r.evm for r in reports])
    se_mean, se_ci = mean_ci([r.spectral_efficiency for r in reports])
    return {
        "n": len(reports),
        "ber": p,
        "ber_ci95": z * ber_se,
        "evm": evm_mean,
        "evm_ci95": evm_ci,
        "spec_eff": se_mean,
        "spec_eff_ci95": se_ci,
        "outage_fraction": sum(r.outage for r in reports) / len(reports),
    }


def sweep_row(report: LinkReport, distance_m=None, snr_db=None) -> dict:
    """Flatten a report into one CSV row; the unused axis stays empty."""
    mode = report.mode
    scheme = ""
    order = ""
    if mode and mode != "outage":
        code = ModeCode.from_name(mode)
        scheme = code.scheme
        order = code.order
    return {
        "distance_m": "" if distance_m is None else distance_m,
        "snr_db": "" if snr_db is None else snr_db,
        "mode": mode,
        "scheme": scheme,
        "qam_order": order,
        "ber": report.ber,
        "evm": report.evm,
        "spec_eff": report.spectral_efficiency,
        "outage": int(report.outage),
    }


def write_sweep_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_sweep_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        return list(reader)
