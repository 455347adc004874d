"""End-to-end link runs: configuration, per-frame pipeline, sweeps, calibration.

A run iterates frames through the chain

    bits -> QAM map -> frame (training + CP blocks) -> [pulse shape -> IF]
    -> channel -> [sync -> matched filter] -> parse -> LS estimate
    -> ZF / diversity detect -> demap -> metrics

and, in adaptive operation, closes the loop by selecting the next mode
from each frame's channel estimate. The default feedback latency is one
frame (the mode chosen from frame k is applied to frame k+1), matching
the split-process transport; a zero-latency variant exists for
differential testing and applies the choice to the same frame, which in
the symbol-domain path shifts the applied-mode trace by exactly one
frame relative to the default.

Reproducibility: every random draw comes from a stream derived from
(master seed, point index, frame index, purpose), so any frame can be
regenerated in isolation; the transport roles rely on this to count bit
errors against locally regenerated transmit data.
"""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from vlclink.adaptation import (
    AdaptPolicy,
    ModeCode,
    ModeController,
    operating_snrs,
    select_mode,
)
from vlclink.channel import GeometryConfig, generate_channel
from vlclink.constellation import build_constellation, compute_evm
from vlclink.detection import OutageError, diversity_combine, zf_detect
from vlclink.estimation import ChannelEstimate, estimate_channel
from vlclink.framing import FrameLayout, TrainingConfig, build_frame, generate_training, parse_frame, training_region
from vlclink.metrics import (
    LinkReport,
    achieved_spectral_efficiency,
    aggregate_reports,
    count_bit_errors,
    sweep_row,
)
from vlclink.waveform import IqBuffer, ShapingConfig, SyncError, downconvert, matched_filter, pulse_shape, rrc_taps, synchronize, upconvert

_PURPOSE_BITS = 0
_PURPOSE_NOISE = 1
LEAD_IN_SAMPLES = 48


class ResolvableBerWarning(UserWarning):
    """The run has too few bits to resolve error rates near the target."""


class ConfigError(ValueError):
    """Experiment configuration is inconsistent."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a link run or sweep.

    Exactly one sweep axis must be set: snr_db drives an identity-channel
    run at the given per-stream SNR (in dB), distance_m drives the
    geometric channel model. Fixed modes are named like "sm64" / "sd16";
    "adaptive" enables the controller, starting from initial_mode.
    """

    mode: str = "adaptive"
    snr_db: tuple[float, ...] | None = None
    distance_m: tuple[float, ...] | None = None
    crosstalk: float = 0.0
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    frames: int = 8
    blocks_per_frame: int = 2
    block: int = 256
    cp: int = 8
    l_ts: int = 64
    n_tx: int = 2
    n_rx: int = 2
    training_seed: int = 2025
    p_total: float = 2.0
    ber_target: float = 1e-3
    noise_var: float | None = None
    initial_mode: str = "sm64"
    dwell: int = 2
    feedback_latency: int = 1
    waveform: bool = False
    shaping: ShapingConfig = field(default_factory=ShapingConfig)
    transport: str = "inproc"
    seed: int = 0

    def __post_init__(self):
        if (self.snr_db is None) == (self.distance_m is None):
            raise ConfigError("exactly one of snr_db / distance_m must be set")
        if self.mode != "adaptive":
            ModeCode.from_name(self.mode)  # validates
        ModeCode.from_name(self.initial_mode)
        if self.feedback_latency not in (0, 1):
            raise ConfigError("feedback latency must be 0 or 1 frame")
        if self.transport not in ("inproc", "udp"):
            raise ConfigError(f"unknown transport {self.transport!r}")
        if self.frames < 1 or self.blocks_per_frame < 1:
            raise ConfigError("frames and blocks_per_frame must be positive")
        if not 0.0 <= self.crosstalk < 1.0:
            raise ConfigError("crosstalk must be in [0, 1)")

    # -- derived quantities ------------------------------------------------

    @property
    def adaptive(self) -> bool:
        return self.mode == "adaptive"

    @property
    def amplitude(self) -> float:
        """Per-transmitter symbol amplitude for equal power sharing."""
        return float(np.sqrt(self.p_total / self.n_tx))

    @property
    def layout(self) -> FrameLayout:
        return FrameLayout(
            l_ts=self.l_ts, block=self.block, cp=self.cp, n_tx=self.n_tx, seed=self.training_seed
        )

    @property
    def payload_symbols(self) -> int:
        return self.blocks_per_frame * self.block

    @property
    def frame_symbols(self) -> int:
        return self.layout.frame_length(self.blocks_per_frame)

    @property
    def policy(self) -> AdaptPolicy:
        return AdaptPolicy(ber_target=self.ber_target, p_total=self.p_total)

    def training(self) -> np.ndarray:
        return generate_training(
            TrainingConfig(
                length=self.l_ts, n_tx=self.n_tx, seed=self.training_seed, amplitude=self.amplitude
            )
        )

    def axis(self) -> tuple[str, tuple[float, ...]]:
        if self.snr_db is not None:
            return "snr_db", tuple(self.snr_db)
        return "distance_m", tuple(self.distance_m)

    def buffer_samples(self) -> int:
        """Waveform-mode buffer length per frame (mode independent)."""
        taps = self.shaping.span * self.shaping.sps + 1
        return LEAD_IN_SAMPLES + self.frame_symbols * self.shaping.sps + taps - 1

    def channel_at(self, point: float) -> tuple[np.ndarray, float]:
        """Channel matrix and noise variance for one sweep point.

        On the SNR axis the channel has unit direct gains and `crosstalk`
        off-diagonal coupling, and the axis value is the transmit-referred
        per-stream SNR amplitude^2 / noise_var in dB.
        """
        if self.snr_db is not None:
            snr = 10.0 ** (float(point) / 10.0)
            eye = np.eye(self.n_rx, self.n_tx)
            h = eye + self.crosstalk * (np.ones_like(eye) - eye)
            return h, self.amplitude**2 / snr
        geo = replace(
            self.geometry, n_tx=self.n_tx, n_rx=self.n_rx, distance_m=float(point)
        )
        noise = self.noise_var if self.noise_var is not None else geo.noise_var
        return generate_channel(geo), noise

    # -- (de)serialization for config files --------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snr_db"] = list(self.snr_db) if self.snr_db is not None else None
        d["distance_m"] = list(self.distance_m) if self.distance_m is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if d.get("geometry") is not None and not isinstance(d["geometry"], GeometryConfig):
            d["geometry"] = GeometryConfig(**d["geometry"])
        if d.get("shaping") is not None and not isinstance(d["shaping"], ShapingConfig):
            d["shaping"] = ShapingConfig(**d["shaping"])
        for axis in ("snr_db", "distance_m"):
            if d.get(axis) is not None:
                d[axis] = tuple(float(v) for v in d[axis])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


def _stream_rng(seed: int, point_idx: int, frame_idx: int, purpose: int) -> np.random.Generator:
    """Counter-split RNG: independent stream per (point, frame, purpose)."""
    return np.random.default_rng([seed, point_idx, frame_idx, purpose])


def wire_quantize(x: np.ndarray) -> np.ndarray:
    """Round samples to binary32, the air/wire interface precision.

    Applied at both hops (transmitter output and channel output) in every
    run, so the in-process chain sees exactly the values a datagram
    transport would deliver and the two stay bit-identical.
    """
    if np.iscomplexobj(x):
        re = x.real.astype(np.float32).astype(np.float64)
        im = x.imag.astype(np.float32).astype(np.float64)
        return re + 1j * im
    return x.astype(np.float32).astype(np.float64)


def frame_bits(cfg: ExperimentConfig, mode: ModeCode, seed: int, point_idx: int, frame_idx: int) -> np.ndarray:
    """The payload bits of one frame; regenerable on both ends of the link."""
    k = mode.bits_per_symbol()
    n_streams = cfg.n_tx if mode.scheme == "sm" else 1
    rng = _stream_rng(seed, point_idx, frame_idx, _PURPOSE_BITS)
    return rng.integers(0, 2, size=n_streams * cfg.payload_symbols * k, dtype=np.int64)


def _noise_block(cfg: ExperimentConfig, noise_var: float, seed: int, point_idx: int, frame_idx: int) -> np.ndarray:
    """Receiver noise for one frame, complex AWGN of total variance noise_var."""
    n = cfg.buffer_samples() if cfg.waveform else cfg.frame_symbols
    if noise_var <= 0:
        return np.zeros((cfg.n_rx, n), dtype=np.complex128)
    rng = _stream_rng(seed, point_idx, frame_idx, _PURPOSE_NOISE)
    scale = np.sqrt(noise_var / 2.0)
    return scale * (
        rng.standard_normal((cfg.n_rx, n)) + 1j * rng.standard_normal((cfg.n_rx, n))
    )


def tx_stage(cfg: ExperimentConfig, mode: ModeCode, seed: int, point_idx: int, frame_idx: int) -> tuple[np.ndarray, np.ndarray]:
    """Build one frame's transmit samples.

    Returns (bits, samples): symbol-domain frames of shape
    (n_tx, frame_symbols), or real passband buffers (n_tx, buffer_samples)
    in waveform mode.
    """
    bits = frame_bits(cfg, mode, seed, point_idx, frame_idx)
    const = build_constellation(mode.order)
    if mode.scheme == "sm":
        per_tx = bits.reshape(cfg.n_tx, -1)
        payload = np.stack([const.map_bits(row) for row in per_tx])
    else:
        symbols = const.map_bits(bits)
        payload = np.tile(symbols, (cfg.n_tx, 1))
    frame = build_frame(cfg.amplitude * payload, cfg.training(), cfg.layout)
    if not cfg.waveform:
        return bits, frame
    shaped = pulse_shape(frame, cfg.shaping).samples
    lead = np.zeros((cfg.n_tx, LEAD_IN_SAMPLES), dtype=shaped.dtype)
    baseband = np.concatenate([lead, shaped], axis=1)
    passband = upconvert(IqBuffer(baseband, cfg.shaping.sample_rate), cfg.shaping)
    return bits, passband.samples


def channel_stage(cfg: ExperimentConfig, h: np.ndarray, tx_samples: np.ndarray, noise: np.ndarray | None) -> np.ndarray:
    """Mix streams through the channel matrix; add noise in symbol mode.

    In waveform mode the samples are real passband and receiver noise is
    injected later, after downconversion, so `noise` is ignored here.
    """
    y = np.asarray(h, dtype=np.float64) @ tx_samples
    if not cfg.waveform and noise is not None:
        y = y + noise
    return y


@dataclass
class FrameResult:
    est: ChannelEstimate | None
    errors: int
    bits: int
    evm: float
    mode: ModeCode
    outage_applied: bool
    lost: bool = False
    sync_offset: int = -1


def sync_template(cfg: ExperimentConfig) -> np.ndarray:
    """Shaped first-slot training used for frame synchronization."""
    ts0 = cfg.training()[0]
    shaped = pulse_shape(ts0, cfg.shaping).samples
    return shaped[: cfg.l_ts * cfg.shaping.sps]


def _recover_symbols(cfg: ExperimentConfig, rx_samples: np.ndarray, noise: np.ndarray | None) -> tuple[np.ndarray, int]:
    """Waveform-mode receiver front end: downconvert, sync, matched filter."""
    bb = downconvert(IqBuffer(rx_samples, cfg.shaping.sample_rate, passband=True), cfg.shaping)
    samples = bb.samples
    if noise is not None:
        samples = samples + noise
    offset, _ = synchronize(IqBuffer(samples[0], cfg.shaping.sample_rate), sync_template(cfg))
    symbols = matched_filter(
        IqBuffer(samples, cfg.shaping.sample_rate), cfg.shaping, cfg.frame_symbols, offset=offset
    )
    return symbols, offset


def rx_stage(
    cfg: ExperimentConfig,
    mode: ModeCode,
    rx_samples: np.ndarray,
    noise: np.ndarray | None,
    seed: int,
    point_idx: int,
    frame_idx: int,
    outage_applied: bool = False,
) -> FrameResult:
    """Process one received frame and score it against regenerated data."""
    offset = -1
    try:
        if cfg.waveform:
            symbols, offset = _recover_symbols(cfg, rx_samples, noise)
        else:
            symbols = rx_samples
        training_obs, payload_obs = parse_frame(symbols, cfg.layout)
        est = estimate_channel(training_obs, cfg.training(), frame_index=frame_idx)
        if mode.scheme == "sm":
            det = zf_detect(est.h_hat, payload_obs)
        else:
            det = diversity_combine(est.h_hat, payload_obs)
    except (SyncError, OutageError):
        bits = frame_bits(cfg, mode, seed, point_idx, frame_idx)
        return FrameResult(
            est=None, errors=0, bits=bits.size, evm=1.0, mode=mode,
            outage_applied=outage_applied, lost=True, sync_offset=offset,
        )
    equalized = det.symbols / cfg.amplitude
    bits = frame_bits(cfg, mode, seed, point_idx, frame_idx)
    const = build_constellation(mode.order)
    if mode.scheme == "sm":
        reference = np.stack([const.map_bits(row) for row in bits.reshape(cfg.n_tx, -1)])
        rx_bits = np.concatenate([const.demap_bits(row) for row in equalized])
    else:
        reference = const.map_bits(bits)[None, :]
        rx_bits = const.demap_bits(equalized[0])
    return FrameResult(
        est=est,
        errors=count_bit_errors(bits, rx_bits),
        bits=bits.size,
        evm=compute_evm(equalized, reference),
        mode=mode,
        outage_applied=outage_applied,
        sync_offset=offset,
    )


def _probe_estimate(cfg: ExperimentConfig, h: np.ndarray, noise: np.ndarray, frame_idx: int) -> ChannelEstimate:
    """Training-only estimate used by the zero-latency feedback variant.

    Mirrors the receive path exactly in the symbol domain (the training
    columns of a quantized full frame equal the quantized training
    region), so the zero-latency trace is the one-frame-ahead version of
    the delayed-feedback trace.
    """
    region = training_region(cfg.training())
    head = cfg.n_tx * cfg.l_ts
    if not cfg.waveform:
        obs = wire_quantize(h @ wire_quantize(region) + noise[:, :head])
        return estimate_channel(obs.reshape(cfg.n_rx, cfg.n_tx, cfg.l_ts), cfg.training(), frame_index=frame_idx)
    shaped = pulse_shape(region, cfg.shaping).samples
    lead = np.zeros((cfg.n_tx, LEAD_IN_SAMPLES), dtype=shaped.dtype)
    passband = upconvert(IqBuffer(np.concatenate([lead, shaped], axis=1), cfg.shaping.sample_rate), cfg.shaping)
    mixed = wire_quantize(h @ wire_quantize(passband.samples))
    bb = downconvert(IqBuffer(mixed, cfg.shaping.sample_rate, passband=True), cfg.shaping)
    samples = bb.samples + noise[:, : bb.samples.shape[1]]
    offset, _ = synchronize(IqBuffer(samples[0], cfg.shaping.sample_rate), sync_template(cfg))
    symbols = matched_filter(IqBuffer(samples, cfg.shaping.sample_rate), cfg.shaping, head, offset=offset)
    return estimate_channel(
        symbols.reshape(cfg.n_rx, cfg.n_tx, cfg.l_ts), cfg.training(), frame_index=frame_idx
    )


def _check_resolvable(cfg: ExperimentConfig, noise_var: float) -> None:
    mode = ModeCode.from_name(cfg.initial_mode if cfg.adaptive else cfg.mode)
    total = cfg.frames * frame_bits(cfg, mode, 0, 0, 0).size
    resolvable = 10.0 / total
    if noise_var > 0 and resolvable > cfg.ber_target:
        warnings.warn(
            f"{cfg.frames} frames resolve BER only down to {resolvable:.2e}, "
            f"above the {cfg.ber_target:.2e} target",
            ResolvableBerWarning,
            stacklevel=3,
        )


def summarize(cfg: ExperimentConfig, records: list[FrameResult], noise_var: float, config_echo: dict) -> LinkReport:
    """Fold per-frame results into a LinkReport.

    Fixed-mode runs pool every frame. Adaptive runs report the settled
    state: the mode of the last frame, scored over the matching frames in
    the second half of the run (the error-free convention gates the
    spectral efficiency on that pooled BER).
    """
    policy = cfg.policy
    trace = ["outage" if r.outage_applied else r.mode.name for r in records]
    live = [r for r in records if not r.lost]
    if cfg.adaptive:
        tail = records[len(records) // 2 :]
        settled_name = trace[len(records) // 2 :][-1]
        scored = [
            r
            for r, name in zip(tail, trace[len(records) // 2 :])
            if name == settled_name and not r.lost
        ]
        if not scored:
            scored = [r for r in tail if not r.lost]
    else:
        settled_name = cfg.mode
        scored = live
    bits = sum(r.bits for r in scored)
    errors = sum(r.errors for r in scored)
    ber = errors / bits if bits else 1.0
    evm = float(np.mean([r.evm for r in scored])) if scored else 1.0
    outage = settled_name == "outage"
    if outage or not scored:
        spec_eff = 0.0
    else:
        spec_eff = achieved_spectral_efficiency(
            ModeCode.from_name(settled_name), ber, policy, n_tx=cfg.n_tx
        )
    last_est = next((r.est for r in reversed(records) if r.est is not None), None)
    if last_est is None:
        sm_list, sd_snr = [], 0.0
    elif noise_var > 0:
        sm_snrs, sd_snr = operating_snrs(last_est, cfg.p_total, noise_var)
        sm_list = [float(v) for v in sm_snrs]
    else:
        # A noise-free link has no finite SNR to report.
        sm_list = [float("inf")] * cfg.n_tx
        sd_snr = float("inf")
    return LinkReport(
        ber=ber,
        evm=evm,
        spectral_efficiency=spec_eff,
        outage=outage,
        mode=settled_name,
        mode_trace=trace,
        dwell_counts=dict(Counter(trace)),
        snr_per_stream=sm_list,
        snr_combined=float(sd_snr),
        total_bits=bits,
        bit_errors=errors,
        frames=len(records),
        frames_lost=sum(r.lost for r in records),
        config=config_echo,
    )


def config_echo(cfg: ExperimentConfig, point: float, seed: int) -> dict:
    """Physical-link configuration attached to reports.

    Transport plumbing is deliberately excluded so that in-process and
    UDP runs of the same link produce identical reports.
    """
    echo = cfg.to_dict()
    echo.pop("transport")
    echo["point"] = float(point)
    echo["run_seed"] = int(seed)
    return echo


def run_link(cfg: ExperimentConfig, point: float | None = None, seed: int | None = None, point_index: int = 0) -> LinkReport:
    """Run one sweep point through the full chain and report link quality."""
    if point is None:
        _, values = cfg.axis()
        if len(values) != 1:
            raise ConfigError("point must be given when the sweep axis has several values")
        point = values[0]
    seed = cfg.seed if seed is None else seed
    if cfg.transport == "udp":
        from vlclink.transport import run_emulated_link

        return run_emulated_link(cfg, point=point, seed=seed, point_index=point_index)

    h, noise_var = cfg.channel_at(point)
    _check_resolvable(cfg, noise_var)
    policy = cfg.policy
    controller = ModeController(ModeCode.from_name(cfg.initial_mode), dwell=cfg.dwell)
    fixed = None if cfg.adaptive else ModeCode.from_name(cfg.mode)
    records: list[FrameResult] = []
    for f in range(cfg.frames):
        noise = _noise_block(cfg, noise_var, seed, point_index, f)
        if cfg.adaptive and cfg.feedback_latency == 0:
            probe = _probe_estimate(cfg, h, noise, f)
            controller.update(select_mode(probe, policy, noise_var))
        applied = fixed if fixed is not None else controller.mode
        outage_applied = applied is None
        mode_f = policy.fallback if outage_applied else applied
        bits, tx_samples = tx_stage(cfg, mode_f, seed, point_index, f)
        rx_samples = wire_quantize(channel_stage(cfg, h, wire_quantize(tx_samples), noise))
        result = rx_stage(
            cfg, mode_f, rx_samples, noise if cfg.waveform else None,
            seed, point_index, f, outage_applied=outage_applied,
        )
        records.append(result)
        if cfg.adaptive and cfg.feedback_latency == 1 and result.est is not None:
            controller.update(select_mode(result.est, policy, noise_var))
    return summarize(cfg, records, noise_var, config_echo(cfg, point, seed))


def sweep(cfg: ExperimentConfig, seeds: tuple[int, ...] | None = None) -> tuple[list[dict], list[LinkReport]]:
    """Run every point of the configured axis, in order.

    Returns (rows, reports): one CSV-ready row per (point, seed), ordered
    by axis then seed, followed per point by one aggregate row whenever
    several seeds were run (pooled BER, mean EVM and spectral efficiency,
    majority mode). Reports are the per-(point, seed) reports, point-major.
    """
    axis, values = cfg.axis()
    if seeds is None:
        seeds = (cfg.seed,)
    rows: list[dict] = []
    reports: list[LinkReport] = []
    for idx, value in enumerate(values):
        axis_kw = {axis: value}
        point_reports = []
        for s in seeds:
            report = run_link(cfg, point=value, seed=s, point_index=idx)
            point_reports.append(report)
            rows.append(sweep_row(report, **axis_kw))
        reports.extend(point_reports)
        if len(seeds) > 1:
            rows.append(_aggregate_row(point_reports, axis_kw))
    return rows, reports


def _aggregate_row(point_reports: list[LinkReport], axis_kw: dict) -> dict:
    agg = aggregate_reports(point_reports)
    majority = Counter(r.mode for r in point_reports).most_common(1)[0][0]
    row = sweep_row(point_reports[0], **axis_kw)
    row["mode"] = majority
    if majority == "outage":
        row["scheme"] = ""
        row["qam_order"] = ""
    else:
        code = ModeCode.from_name(majority)
        row["scheme"] = code.scheme
        row["qam_order"] = code.order
    row["ber"] = agg["ber"]
    row["evm"] = agg["evm"]
    row["spec_eff"] = agg["spec_eff"]
    row["outage"] = int(agg["outage_fraction"] > 0.5)
    return row


def calibrate(
    geometry: GeometryConfig | None = None,
    target_distance_m: float = 1.7,
    ber_target: float = 1e-3,
    p_total: float = 2.0,
    mode_name: str = "sm64",
) -> dict:
    """Fit the channel gain constant to the anchor range.

    Bisection on the gain constant (noise variance held at the geometry's
    value) until a fixed link in the given mode predicts exactly the
    target BER at the target distance, i.e. until the error-free range of
    that mode lands on the anchor. The objective uses the deterministic
    SNR mapping of the true channel (min post-ZF stream SNR for
    multiplexing, combined SNR for diversity) against the order's
    threshold; Monte-Carlo runs reproduce it within their confidence
    interval.

    Returns a dict with the fitted "gain", the updated "geometry", and an
    echo of the anchor parameters.
    """
    from vlclink.adaptation import SCHEME_SM, snr_threshold
    from vlclink.detection import effective_channel, zf_weights

    geo = geometry if geometry is not None else GeometryConfig()
    mode = ModeCode.from_name(mode_name)
    target_snr = snr_threshold(mode.order, ber_target)

    def operating_snr(gain: float) -> float:
        h = generate_channel(replace(geo, gain=gain, distance_m=target_distance_m))
        rho = p_total / (h.shape[1] * geo.noise_var)
        if mode.scheme == SCHEME_SM:
            w, _ = zf_weights(h)
            return float(np.min(rho / np.sum(w**2, axis=1)))
        h_eff = effective_channel(h)
        return float(rho * h_eff @ h_eff)

    lo, hi = 1e-9, 1e6
    if not operating_snr(lo) < target_snr < operating_snr(hi):
        raise ValueError("anchor SNR not bracketed; geometry or noise out of range")
    for _ in range(200):
        mid = np.sqrt(lo * hi)  # geometric bisection: SNR scales as gain^2
        if operating_snr(mid) < target_snr:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-12:
            break
    gain = float(np.sqrt(lo * hi))
    return {
        "gain": gain,
        "geometry": replace(geo, gain=gain),
        "target_distance_m": target_distance_m,
        "ber_target": ber_target,
        "mode": mode.name,
        "p_total": p_total,
        "operating_snr": operating_snr(gain),
        "snr_threshold": target_snr,
    }
