"""Command-line entry points: runs, sweeps, calibration, transport roles.

Usage sketch:

    vlclink run --snr-db 25 --mode adaptive --frames 8
    vlclink sweep-snr --start 0 --stop 32 --step 1 --out sweep.csv
    vlclink sweep-distance --start 0.2 --stop 2.6 --step 0.1 --out d.csv
    vlclink calibrate --distance-m 1.7 --mode sm64
    vlclink selftest
    vlclink rx  --point 20 --listen 127.0.0.1:5003 --peer 127.0.0.1:5001
    vlclink chan --point 20 --listen 127.0.0.1:5002 --peer 127.0.0.1:5003
    vlclink tx  --point 20 --listen 127.0.0.1:5001 --peer 127.0.0.1:5002

Configuration may come from a JSON file (--config); explicit flags
override file values. Failures exit nonzero after printing a single
machine-readable line ``ERROR {...}`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import socket
import sys
from dataclasses import asdict, replace

from vlclink.channel import GeometryConfig
from vlclink.link import ExperimentConfig, calibrate, run_link, sweep
from vlclink.metrics import CSV_FIELDS


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment config; flags override its values")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--mode", help="sm4|sm16|sm64|sm256|sd4|sd16|sd64|sd256|adaptive")
    parser.add_argument("--frames", type=int, help="frames per point")
    parser.add_argument("--blocks", type=int, help="payload blocks per frame")
    parser.add_argument("--waveform", choices=("on", "off"), help="full shaped/IF path vs symbol-domain fast path")
    parser.add_argument("--transport", choices=("inproc", "udp"), help="in-process chain or loopback UDP roles")
    parser.add_argument("--latency", type=int, choices=(0, 1), help="feedback latency in frames")
    parser.add_argument("--crosstalk", type=float, help="off-diagonal coupling on the SNR axis")
    parser.add_argument("--ber-target", type=float, help="mode feasibility BER target")


def _add_axis_point(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snr-db", type=float, help="single identity-channel SNR point")
    parser.add_argument("--distance-m", type=float, help="single geometric-channel distance point")


def _build_config(args, axis: dict | None = None) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    overrides = {
        "seed": args.seed,
        "mode": args.mode,
        "frames": args.frames,
        "blocks_per_frame": args.blocks,
        "transport": getattr(args, "transport", None),
        "feedback_latency": getattr(args, "latency", None),
        "crosstalk": args.crosstalk,
        "ber_target": args.ber_target,
    }
    if args.waveform is not None:
        overrides["waveform"] = args.waveform == "on"
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    if axis:
        base.pop("snr_db", None)
        base.pop("distance_m", None)
        base.update(axis)
    return ExperimentConfig.from_dict(base)


def _axis_from_point(args) -> dict:
    if (args.snr_db is None) == (args.distance_m is None):
        raise ValueError("give exactly one of --snr-db / --distance-m")
    if args.snr_db is not None:
        return {"snr_db": (args.snr_db,)}
    return {"distance_m": (args.distance_m,)}


def _sweep_values(args) -> tuple[float, ...]:
    if args.values:
        return tuple(float(v) for v in args.values.split(","))
    if args.start is None or args.stop is None or args.step is None:
        raise ValueError("give --start/--stop/--step or --values")
    if args.step <= 0:
        raise ValueError("--step must be positive")
    values = []
    v = args.start
    while v <= args.stop + 1e-9:
        values.append(round(v, 9))
        v += args.step
    if not values:
        raise ValueError("empty sweep axis")
    return tuple(values)


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_rows(rows: list[dict], out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", newline="") as fh:
            _dump_csv(fh, rows)
    else:
        _dump_csv(sys.stdout, rows)


def _dump_csv(fh, rows: list[dict]) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
    writer.writeheader()
    writer.writerows(rows)


def _cmd_run(args) -> int:
    cfg = _build_config(args, _axis_from_point(args))
    report = run_link(cfg)
    _emit(report.to_json() + "\n", args.out)
    return 0


def _cmd_sweep(args, axis_name: str) -> int:
    cfg = _build_config(args, {axis_name: _sweep_values(args)})
    seeds = tuple(cfg.seed + i for i in range(args.repeats))
    rows, _ = sweep(cfg, seeds=seeds)
    _write_rows(rows, args.out)
    return 0


def _cmd_calibrate(args) -> int:
    geo = GeometryConfig()
    if args.noise_var is not None:
        geo = replace(geo, noise_var=args.noise_var)
    result = calibrate(
        geometry=geo,
        target_distance_m=args.distance_m,
        ber_target=args.ber_target if args.ber_target is not None else 1e-3,
        mode_name=args.mode or "sm64",
    )
    result["geometry"] = asdict(result["geometry"])
    _emit(json.dumps(result, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_selftest(args) -> int:
    from vlclink.selfcheck import run_selfcheck

    failures = 0
    for name, ok, detail in run_selfcheck():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += 0 if ok else 1
    return 1 if failures else 0


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def _bound(addr: tuple[str, int], timeout: float) -> socket.socket:
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sock.bind(addr)
    sock.settimeout(timeout)
    return sock


def _role_common(args) -> tuple[ExperimentConfig, float, int]:
    cfg = _build_config(args, _axis_from_point(args))
    cfg = replace(cfg, transport="inproc")  # the role itself is the transport
    _, values = cfg.axis()
    return cfg, values[0], cfg.seed


def _cmd_tx(args) -> int:
    from vlclink.transport import tx_role

    cfg, point, seed = _role_common(args)
    fb_sock = _bound(_parse_addr(args.listen), args.timeout)
    try:
        tx_role(cfg, point, seed, args.point_index, _parse_addr(args.peer), fb_sock)
    finally:
        fb_sock.close()
    return 0


def _cmd_chan(args) -> int:
    from vlclink.transport import chan_role

    cfg, point, seed = _role_common(args)
    data_sock = _bound(_parse_addr(args.listen), args.timeout)
    try:
        chan_role(cfg, point, seed, args.point_index, data_sock, _parse_addr(args.peer))
    finally:
        data_sock.close()
    return 0


def _cmd_rx(args) -> int:
    from vlclink.transport import rx_role

    cfg, point, seed = _role_common(args)
    data_sock = _bound(_parse_addr(args.listen), args.timeout)
    try:
        report = rx_role(cfg, point, seed, args.point_index, data_sock, _parse_addr(args.peer))
    finally:
        data_sock.close()
    _emit(report.to_json() + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlclink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one point and print its report as JSON")
    _add_common(p_run)
    _add_axis_point(p_run)
    p_run.add_argument("--out", help="report path ('-' = stdout)")
    p_run.set_defaults(func=_cmd_run)

    for name, axis in (("sweep-snr", "snr_db"), ("sweep-distance", "distance_m")):
        p = sub.add_parser(name, help=f"sweep {axis} and emit CSV rows")
        _add_common(p)
        p.add_argument("--start", type=float)
        p.add_argument("--stop", type=float)
        p.add_argument("--step", type=float)
        p.add_argument("--values", help="explicit comma-separated axis values")
        p.add_argument("--repeats", type=int, default=1, help="seeds per point; >1 adds aggregate rows")
        p.add_argument("--out", help="CSV path ('-' = stdout)")
        p.set_defaults(func=lambda a, axis=axis: _cmd_sweep(a, axis))

    p_cal = sub.add_parser("calibrate", help="fit the channel gain to an anchor range")
    p_cal.add_argument("--distance-m", type=float, default=1.7)
    p_cal.add_argument("--mode", help="anchored fixed mode (default sm64)")
    p_cal.add_argument("--ber-target", type=float)
    p_cal.add_argument("--noise-var", type=float)
    p_cal.add_argument("--out", help="JSON path ('-' = stdout)")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_self = sub.add_parser("selftest", help="run the invariant suites")
    p_self.set_defaults(func=_cmd_selftest)

    for name, func, help_text in (
        ("tx", _cmd_tx, "transmitter role (listens for feedback, streams to the channel)"),
        ("chan", _cmd_chan, "channel-emulator role (listens for tx, streams to rx)"),
        ("rx", _cmd_rx, "receiver role (listens for chan, feeds back, prints report)"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        _add_axis_point(p)
        p.add_argument("--listen", required=True, help="host:port this role binds")
        p.add_argument("--peer", required=True, help="host:port of the downstream role")
        p.add_argument("--timeout", type=float, default=10.0)
        p.add_argument("--point-index", type=int, default=0)
        p.add_argument("--out", help="report path, rx only ('-' = stdout)")
        p.set_defaults(func=func)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # noqa: BLE001 - single reporting point for the CLI
        line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
        print(f"ERROR {line}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
