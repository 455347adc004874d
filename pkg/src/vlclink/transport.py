"""Split-role link emulation over UDP datagrams.

Three roles move one frame per step in lockstep: the transmitter streams
sample chunks to the channel emulator, the emulator mixes them through
the channel matrix and forwards them to the receiver, and the receiver
answers with a one-byte mode feedback that doubles as flow control.
Everything signal-related is delegated to the stage functions in
vlclink.link, so a loopback run reproduces the in-process result
bit for bit; feedback arrives one frame late by construction.

Wire layout (all little-endian):

    WireFrame   "VLCF" | u32 seq | u32 sample count | u8 stream | u8 flags
                followed by count interleaved float32 (I, Q) pairs
    FeedbackMsg u8 feedback byte | u32 frame index it responds to

Sequence numbers increase by one per datagram per stream; a gap marks
the frame as lost (skipped and counted, never fatal).
"""

from __future__ import annotations

import socket
import struct
import threading
from dataclasses import dataclass

import numpy as np

from vlclink.adaptation import (
    ModeCode,
    ModeController,
    decode_feedback,
    encode_feedback,
    select_mode,
)
from vlclink.framing import MalformedFrameError
from vlclink.link import (
    ExperimentConfig,
    FrameResult,
    _noise_block,
    channel_stage,
    config_echo,
    frame_bits,
    rx_stage,
    summarize,
    tx_stage,
    wire_quantize,
)
from vlclink.metrics import LinkReport

WIRE_MAGIC = b"VLCF"
_HEADER = struct.Struct("<4sIIBB")
_FEEDBACK = struct.Struct("<BI")
HEADER_BYTES = _HEADER.size

FLAG_FRAME_END = 0x01
FLAG_PASSBAND = 0x02
FLAG_OUTAGE = 0x20
_MODE_SHIFT = 2  # bits 2..4 carry the 3-bit mode code

CHUNK_SAMPLES = 4096
DEFAULT_TIMEOUT = 10.0


class TransportTimeoutError(RuntimeError):
    """No datagram arrived within the deadline."""


@dataclass
class WireFrame:
    seq: int
    stream: int
    flags: int
    samples: np.ndarray  # complex128, Q = 0 for passband payloads

    @property
    def frame_end(self) -> bool:
        return bool(self.flags & FLAG_FRAME_END)


def mode_flags(mode: ModeCode, outage: bool, passband: bool) -> int:
    flags = mode.encode() << _MODE_SHIFT
    if outage:
        flags |= FLAG_OUTAGE
    if passband:
        flags |= FLAG_PASSBAND
    return flags


def decode_mode_flags(flags: int) -> tuple[ModeCode, bool]:
    """Applied mode and outage marker stamped into a frame's flags."""
    return ModeCode.decode((flags >> _MODE_SHIFT) & 0x07), bool(flags & FLAG_OUTAGE)


def serialize_frame(samples: np.ndarray, seq: int, stream: int, flags: int = 0) -> bytes:
    """Encode one chunk of samples as a datagram."""
    arr = np.asarray(samples)
    iq = np.empty(2 * arr.size, dtype="<f4")
    if np.iscomplexobj(arr):
        iq[0::2] = arr.real
        iq[1::2] = arr.imag
    else:
        iq[0::2] = arr
        iq[1::2] = 0.0
    header = _HEADER.pack(WIRE_MAGIC, seq, arr.size, stream, flags)
    return header + iq.tobytes()


def deserialize_frame(data: bytes) -> WireFrame:
    """Decode a datagram; rejects bad magic and length mismatches."""
    if len(data) < HEADER_BYTES:
        raise MalformedFrameError(f"datagram truncated: {len(data)} < {HEADER_BYTES} header bytes")
    magic, seq, count, stream, flags = _HEADER.unpack_from(data)
    if magic != WIRE_MAGIC:
        raise MalformedFrameError(f"bad magic {magic!r}")
    payload = data[HEADER_BYTES:]
    if len(payload) != 8 * count:
        raise MalformedFrameError(
            f"length mismatch: header claims {count} samples, payload holds {len(payload)} bytes"
        )
    iq = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    samples = iq[0::2] + 1j * iq[1::2]
    return WireFrame(seq=seq, stream=stream, flags=flags, samples=samples)


def _iter_chunks(row: np.ndarray):
    for start in range(0, row.size, CHUNK_SAMPLES):
        chunk = row[start : start + CHUNK_SAMPLES]
        yield chunk, start + chunk.size == row.size


def send_streams(sock: socket.socket, addr, samples: np.ndarray, seqs: list[int], flags: int) -> None:
    """Chunk and send one frame's worth of per-stream samples."""
    for stream, row in enumerate(samples):
        for chunk, last in _iter_chunks(row):
            chunk_flags = flags | (FLAG_FRAME_END if last else 0)
            sock.sendto(serialize_frame(chunk, seqs[stream], stream, chunk_flags), addr)
            seqs[stream] += 1


@dataclass
class _AssembledFrame:
    samples: np.ndarray | None
    flags: int
    lost: bool


def recv_streams(sock: socket.socket, n_streams: int, seqs: list[int], passband: bool) -> _AssembledFrame:
    """Collect datagrams until every stream has its end-of-frame chunk.

    A sequence gap marks the frame lost; the collection still runs to the
    end-of-frame markers so the link stays in step.
    """
    parts: list[list[np.ndarray]] = [[] for _ in range(n_streams)]
    done = [False] * n_streams
    lost = False
    flags = 0
    while not all(done):
        try:
            data, _ = sock.recvfrom(1 << 20)
        except socket.timeout as exc:
            raise TransportTimeoutError("no datagram within deadline") from exc
        wf = deserialize_frame(data)
        if wf.stream >= n_streams:
            raise MalformedFrameError(f"stream id {wf.stream} out of range")
        if wf.seq != seqs[wf.stream]:
            lost = True
        seqs[wf.stream] = wf.seq + 1
        flags = wf.flags
        parts[wf.stream].append(wf.samples)
        if wf.frame_end:
            done[wf.stream] = True
    if lost:
        return _AssembledFrame(samples=None, flags=flags, lost=True)
    rows = [np.concatenate(p) for p in parts]
    if len({r.size for r in rows}) != 1 or rows[0].size == 0:
        return _AssembledFrame(samples=None, flags=flags, lost=True)
    samples = np.stack(rows)
    if passband:
        samples = samples.real.copy()
    return _AssembledFrame(samples=samples, flags=flags, lost=False)


def tx_role(
    cfg: ExperimentConfig,
    point: float,
    seed: int,
    point_index: int,
    data_addr,
    feedback_sock: socket.socket,
    sock: socket.socket | None = None,
) -> None:
    """Transmitter: streams frames, applying the mode fed back each frame."""
    own = sock is None
    sock = sock or socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    policy = cfg.policy
    applied: ModeCode | None = ModeCode.from_name(cfg.initial_mode if cfg.adaptive else cfg.mode)
    seqs = [0] * cfg.n_tx
    try:
        for f in range(cfg.frames):
            if f > 0:
                # Lockstep: every frame is acknowledged by one feedback
                # datagram, which doubles as the next mode in adaptive runs.
                byte = _recv_feedback(feedback_sock, f - 1)
                if cfg.adaptive:
                    applied = decode_feedback(byte)
            outage = applied is None
            mode_f = policy.fallback if outage else applied
            _, samples = tx_stage(cfg, mode_f, seed, point_index, f)
            flags = mode_flags(mode_f, outage, cfg.waveform)
            send_streams(sock, data_addr, wire_quantize(samples), seqs, flags)
    finally:
        if own:
            sock.close()


def _recv_feedback(sock: socket.socket, want_seq: int) -> int:
    while True:
        try:
            data, _ = sock.recvfrom(64)
        except socket.timeout as exc:
            raise TransportTimeoutError("no feedback within deadline") from exc
        byte, seq = _FEEDBACK.unpack(data[: _FEEDBACK.size])
        if seq >= want_seq:
            return byte


def chan_role(
    cfg: ExperimentConfig,
    point: float,
    seed: int,
    point_index: int,
    data_sock: socket.socket,
    out_addr,
    out_sock: socket.socket | None = None,
) -> None:
    """Channel emulator: mixes incoming streams through H, adds noise."""
    own = out_sock is None
    out_sock = out_sock or socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    h, noise_var = cfg.channel_at(point)
    in_seqs = [0] * cfg.n_tx
    out_seqs = [0] * cfg.n_rx
    try:
        for f in range(cfg.frames):
            frame = recv_streams(data_sock, cfg.n_tx, in_seqs, passband=cfg.waveform)
            if frame.lost or frame.samples is None:
                # Forward an empty end-of-frame marker per stream to keep
                # the receiver's frame counter aligned.
                for stream in range(cfg.n_rx):
                    out_sock.sendto(
                        serialize_frame(np.empty(0), out_seqs[stream], stream, frame.flags | FLAG_FRAME_END),
                        out_addr,
                    )
                    out_seqs[stream] += 1
                continue
            noise = None if cfg.waveform else _noise_block(cfg, noise_var, seed, point_index, f)
            y = wire_quantize(channel_stage(cfg, h, frame.samples, noise))
            send_streams(out_sock, out_addr, y, out_seqs, frame.flags & ~FLAG_FRAME_END)
    finally:
        if own:
            out_sock.close()


def rx_role(
    cfg: ExperimentConfig,
    point: float,
    seed: int,
    point_index: int,
    data_sock: socket.socket,
    feedback_addr,
    feedback_sock: socket.socket | None = None,
) -> LinkReport:
    """Receiver: detects frames, selects modes, reports link quality."""
    own = feedback_sock is None
    feedback_sock = feedback_sock or socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    _, noise_var = cfg.channel_at(point)
    policy = cfg.policy
    controller = ModeController(ModeCode.from_name(cfg.initial_mode), dwell=cfg.dwell)
    in_seqs = [0] * cfg.n_rx
    records: list[FrameResult] = []
    try:
        for f in range(cfg.frames):
            frame = recv_streams(data_sock, cfg.n_rx, in_seqs, passband=cfg.waveform)
            mode_f, outage = decode_mode_flags(frame.flags)
            if frame.lost or frame.samples is None:
                bits = frame_bits(cfg, mode_f, seed, point_index, f)
                result = FrameResult(
                    est=None, errors=0, bits=bits.size, evm=1.0, mode=mode_f,
                    outage_applied=outage, lost=True,
                )
            else:
                noise = (
                    _noise_block(cfg, noise_var, seed, point_index, f) if cfg.waveform else None
                )
                result = rx_stage(
                    cfg, mode_f, frame.samples, noise, seed, point_index, f, outage_applied=outage
                )
            records.append(result)
            if cfg.adaptive and result.est is not None:
                controller.update(select_mode(result.est, policy, noise_var))
            answer = controller.mode if cfg.adaptive else mode_f
            feedback_sock.sendto(_FEEDBACK.pack(encode_feedback(answer), f), feedback_addr)
    finally:
        if own:
            feedback_sock.close()
    return summarize(cfg, records, noise_var, config_echo(cfg, point, seed))


def _bound_socket(timeout: float) -> socket.socket:
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sock.bind(("127.0.0.1", 0))
    sock.settimeout(timeout)
    return sock


def run_emulated_link(
    cfg: ExperimentConfig,
    point: float | None = None,
    seed: int | None = None,
    point_index: int = 0,
    timeout: float = DEFAULT_TIMEOUT,
) -> LinkReport:
    """Run the three roles as threads over loopback UDP.

    The returned report is the receiver's and matches the in-process
    run_link result exactly for the same configuration and seed.
    """
    if point is None:
        _, values = cfg.axis()
        if len(values) != 1:
            raise ValueError("point must be given when the sweep axis has several values")
        point = values[0]
    seed = cfg.seed if seed is None else seed

    chan_sock = _bound_socket(timeout)
    rx_sock = _bound_socket(timeout)
    fb_sock = _bound_socket(timeout)
    result: dict = {}
    errors: list[BaseException] = []

    def _guard(fn, *args, **kwargs):
        def body():
            try:
                out = fn(*args, **kwargs)
                if out is not None:
                    result["report"] = out
            except BaseException as exc:  # noqa: BLE001 - surfaced after join
                errors.append(exc)

        return body

    threads = [
        threading.Thread(
            target=_guard(
                chan_role, cfg, point, seed, point_index, chan_sock, rx_sock.getsockname()
            ),
            name="chan",
        ),
        threading.Thread(
            target=_guard(
                rx_role, cfg, point, seed, point_index, rx_sock, fb_sock.getsockname()
            ),
            name="rx",
        ),
        threading.Thread(
            target=_guard(
                tx_role, cfg, point, seed, point_index, chan_sock.getsockname(), fb_sock
            ),
            name="tx",
        ),
    ]
    try:
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=timeout * (cfg.frames + 2))
    finally:
        for s in (chan_sock, rx_sock, fb_sock):
            s.close()
    if errors:
        raise errors[0]
    if any(t.is_alive() for t in threads):
        raise TransportTimeoutError("transport roles did not finish")
    return result["report"]
