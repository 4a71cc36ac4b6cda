"""Transition logs, signature/baseline/report files and the ``infosig`` command line."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import monitor, simlab
from .counts import CountTable, WindowedAccumulator
from .infometrics import METRICS, InfoSignature, signature
from .symbolizer import DEFAULT_CONFIG, SymbolizerConfig, symbolize_actions, symbolize_states

CSV_COLUMNS = ("step",) + METRICS + ("n", "support_s", "support_a", "support_snext")
_VECTOR_FIELDS = ("s", "a", "s_next")
_OPTIONAL_VECTOR_FIELDS = ("s_true", "s_next_true")
_KNOWN_FIELDS = {"t", "r", "done", *_VECTOR_FIELDS, *_OPTIONAL_VECTOR_FIELDS}


class LogFormatError(ValueError):
    """A malformed log line; the message names the line and field."""


class SequencingError(LogFormatError):
    pass


class SchemaError(ValueError):
    pass


class IncompatibleVersionError(SchemaError):
    pass


@dataclass(frozen=True)
class TransitionRecord:
    t: int
    s: tuple
    a: tuple
    s_next: tuple
    r: float | None = None
    done: bool = False
    s_true: tuple | None = None
    s_next_true: tuple | None = None

    def to_dict(self) -> dict:
        d = {"t": self.t, "s": list(self.s), "a": list(self.a), "s_next": list(self.s_next)}
        if self.r is not None:
            d["r"] = self.r
        d["done"] = self.done
        if self.s_true is not None:
            d["s_true"] = list(self.s_true)
        if self.s_next_true is not None:
            d["s_next_true"] = list(self.s_next_true)
        return d


@dataclass(frozen=True)
class RunConfig:
    symbolizer: SymbolizerConfig = DEFAULT_CONFIG
    window: int = 2000
    boundary: int = 5000
    stride: int = 100
    thresholds: monitor.Thresholds = monitor.DEFAULT_THRESHOLDS
    episode_policy: str = "include_terminal"
    stream: str = "observed"

    def __post_init__(self):
        if self.window < 1 or self.boundary < 1 or self.stride < 1:
            raise monitor.ConfigurationError("window, boundary and stride must be >= 1")
        if self.episode_policy not in ("include_terminal", "exclude_terminal"):
            raise monitor.ConfigurationError(f"unknown episode policy {self.episode_policy!r}")
        if self.stream not in ("observed", "true"):
            raise monitor.ConfigurationError(f"unknown analyzer stream {self.stream!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "symbolizer" in d:
            d["symbolizer"] = SymbolizerConfig.from_dict(d["symbolizer"])
        th = d.get("thresholds")
        if isinstance(th, str):
            if th not in monitor.THRESHOLD_PRESETS:
                raise monitor.ConfigurationError(f"unknown threshold preset {th!r}")
            d["thresholds"] = monitor.THRESHOLD_PRESETS[th]
        elif isinstance(th, dict):
            d["thresholds"] = monitor.Thresholds.from_dict(th)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise monitor.ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------- logs

def _vector(value, dims: int, lineno: int, name: str) -> tuple:
    if not isinstance(value, list) or len(value) != dims:
        got = len(value) if isinstance(value, list) else type(value).__name__
        raise LogFormatError(f"line {lineno}: field '{name}' must be a {dims}-vector, got {got}")
    out = []
    for x in value:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise LogFormatError(f"line {lineno}: field '{name}' has a non-finite or non-numeric component")
        out.append(float(x))
    return tuple(out)


def parse_record(line: str, lineno: int, dims: int = 3) -> TransitionRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise LogFormatError(f"line {lineno}: record must be an object")
    unknown = set(obj) - _KNOWN_FIELDS
    if unknown:
        raise LogFormatError(f"line {lineno}: unknown field '{sorted(unknown)[0]}'")
    for name in ("t", "done", *_VECTOR_FIELDS):
        if name not in obj:
            raise LogFormatError(f"line {lineno}: missing field '{name}'")
    t = obj["t"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise LogFormatError(f"line {lineno}: field 't' must be an integer")
    if not isinstance(obj["done"], bool):
        raise LogFormatError(f"line {lineno}: field 'done' must be a boolean")
    r = obj.get("r")
    if r is not None and (isinstance(r, bool) or not isinstance(r, (int, float)) or not math.isfinite(r)):
        raise LogFormatError(f"line {lineno}: field 'r' must be a finite number")
    vec = {k: _vector(obj[k], dims, lineno, k) for k in _VECTOR_FIELDS}
    opt = {k: _vector(obj[k], dims, lineno, k) if obj.get(k) is not None else None for k in _OPTIONAL_VECTOR_FIELDS}
    return TransitionRecord(t=t, r=None if r is None else float(r), done=obj["done"], **vec, **opt)


def parse_log(path, dims: int = 3) -> Iterator[TransitionRecord]:
    """Lazily parse and validate a line-delimited JSON transition log."""
    last = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = parse_record(line, lineno, dims)
            if last is not None and rec.t <= last:
                raise SequencingError(f"line {lineno}: t={rec.t} does not increase (previous {last})")
            last = rec.t
            yield rec


def _json_line(d: dict) -> str:
    return json.dumps(d, separators=(",", ":"), allow_nan=False)


def write_log(records: Iterable[TransitionRecord] | simlab.TransitionLog, path) -> int:
    if isinstance(records, simlab.TransitionLog):
        records = records.records()
    n = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(_json_line(rec.to_dict()))
            fh.write("\n")
            n += 1
    return n


# ---------------------------------------------------------------- analysis

def _triples_from_log(log: simlab.TransitionLog, cfg: RunConfig) -> np.ndarray:
    use_true = cfg.stream == "true" and log.s_true is not None
    s = log.s_true if use_true else log.s
    sn = log.s_next_true if use_true else log.s_next
    sym = cfg.symbolizer
    codes = np.stack([symbolize_states(s, sym), symbolize_actions(log.a, sym), symbolize_states(sn, sym)], axis=1)
    if cfg.episode_policy == "exclude_terminal":
        codes = codes[~np.asarray(log.done, dtype=bool)]
    return codes


def _triples_from_records(records: Iterable[TransitionRecord], cfg: RunConfig, chunk: int = 4096):
    """Yield code triples in chunks so memory stays bounded for long logs."""
    sym = cfg.symbolizer
    buf: list[TransitionRecord] = []

    def flush():
        s = [(r.s_true if cfg.stream == "true" and r.s_true is not None else r.s) for r in buf]
        sn = [(r.s_next_true if cfg.stream == "true" and r.s_next_true is not None else r.s_next) for r in buf]
        codes = np.stack([symbolize_states(s, sym), symbolize_actions([r.a for r in buf], sym),
                          symbolize_states(sn, sym)], axis=1)
        if cfg.episode_policy == "exclude_terminal":
            codes = codes[~np.array([r.done for r in buf], dtype=bool)]
        return codes

    for rec in records:
        buf.append(rec)
        if len(buf) == chunk:
            yield from flush().tolist()
            buf = []
    if buf:
        yield from flush().tolist()


def symbol_stream(log, cfg: RunConfig) -> Iterator:
    if isinstance(log, simlab.TransitionLog):
        return iter(_triples_from_log(log, cfg).tolist())
    if isinstance(log, (str, Path)):
        log = parse_log(log, cfg.symbolizer.dims)
    return _triples_from_records(log, cfg)


def analyze(log, config: RunConfig = RunConfig(), mode: str = "sliding") -> list[InfoSignature]:
    """Signatures at every B boundary (cumulative) or every ``stride`` steps over the last W (sliding)."""
    if mode not in ("cumulative", "sliding"):
        raise monitor.ConfigurationError(f"unknown analysis mode {mode!r}")
    out: list[InfoSignature] = []
    if mode == "cumulative":
        table = CountTable()
        for s, a, sn in symbol_stream(log, config):
            table.add(s, a, sn)
            if table.n % config.boundary == 0:
                out.append(signature(table, table.n))
        return out
    acc = WindowedAccumulator(window=config.window, boundary=config.boundary)
    table = acc.window_table
    ring = acc.ring
    w, stride = config.window, config.stride
    n = 0
    for s, a, sn in symbol_stream(log, config):
        # window-only bookkeeping keeps memory proportional to W
        if len(ring) == w:
            table.remove(*ring.popleft())
        ring.append((s, a, sn))
        table.add(s, a, sn)
        n += 1
        if n >= w and (n - w) % stride == 0:
            out.append(signature(table, n, window=w))
    if n < w:
        raise monitor.InsufficientDataError(f"log has {n} transitions, fewer than one window of {w}")
    return out


# ---------------------------------------------------------------- serialization

def _f6(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def emit_csv(signatures: Sequence[InfoSignature], path) -> None:
    if not signatures:
        raise ValueError("emit_csv needs at least one signature")
    lines = [",".join(CSV_COLUMNS)]
    for sig in signatures:
        row = [str(sig.step_index)] + [_f6(getattr(sig, k)) for k in METRICS]
        row += [str(sig.n)] + [str(x) for x in sig.support]
        lines.append(",".join(row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> list[dict]:
    import csv

    with open(path, newline="") as fh:
        return [{k: float(v) if k in METRICS else int(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def save_baseline(base: monitor.Baseline, path) -> None:
    _dump_json({
        "schema_version": base.schema_version,
        "window": base.window,
        "source": {"start_step": base.start_step, "end_step": base.end_step, "n_windows": base.n_windows},
        "mean": base.mean,
        "std": base.std,
    }, path)


def load_baseline(path) -> monitor.Baseline:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"baseline is not valid JSON: {exc.msg}") from None
    version = obj.get("schema_version")
    if version != monitor.SCHEMA_VERSION:
        raise IncompatibleVersionError(
            f"baseline schema_version {version!r} is not supported (expected {monitor.SCHEMA_VERSION})")
    try:
        src = obj["source"]
        mean = {k: float(obj["mean"][k]) for k in METRICS}
        std = {k: float(obj["std"][k]) for k in METRICS}
        return monitor.Baseline(mean, std, obj["window"], int(src["start_step"]), int(src["end_step"]),
                                int(src["n_windows"]), version)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"baseline is missing field {exc}") from None


def report_dict(rep: monitor.DiagnosisReport) -> dict:
    return {
        "verdict": rep.verdict,
        "severity_bits": round(rep.severity_bits, 9),
        "deltas": {k: round(v, 9) for k, v in rep.deltas.items()},
        "z": {k: round(v, 6) for k, v in rep.z.items()},
        "window": {"start_step": rep.window_start, "end_step": rep.window_end},
        "thresholds": rep.thresholds,
    }


def save_report(rep: monitor.DiagnosisReport, path) -> None:
    _dump_json(report_dict(rep), path)


def format_report(rep: monitor.DiagnosisReport) -> str:
    lines = [f"verdict: {rep.verdict}", f"severity_bits: {rep.severity_bits:.6f}",
             f"windows: {rep.window_start}..{rep.window_end}"]
    lines += [f"  d{k}: {rep.deltas[k]:+.6f}" for k in METRICS]
    return "\n".join(lines)


# ---------------------------------------------------------------- pipelines

def build_baseline(log, config: RunConfig, from_step: int, to_step: int) -> monitor.Baseline:
    sigs = analyze(log, config, "sliding")
    chosen = [s for s in sigs if from_step <= s.step_index <= to_step]
    return monitor.capture_baseline(chosen)


def run_diagnosis(log, base: monitor.Baseline, config: RunConfig) -> monitor.DiagnosisReport:
    if base.window is not None and base.window != config.window:
        config = RunConfig(**{**{f: getattr(config, f) for f in config.__dataclass_fields__}, "window": base.window})
    sigs = analyze(log, config, "sliding")
    return monitor.diagnose(sigs, base, config.thresholds)


# ---------------------------------------------------------------- CLI

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    over = {}
    for name in ("window", "boundary", "stride", "stream"):
        v = getattr(args, name, None)
        if v is not None:
            over[name] = v
    if getattr(args, "thresholds", None):
        over["thresholds"] = monitor.THRESHOLD_PRESETS[args.thresholds]
    if over:
        cfg = RunConfig(**{**{f: getattr(cfg, f) for f in cfg.__dataclass_fields__}, **over})
    return cfg


def _analysis_flags(p, window=True):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--stream", choices=("observed", "true"), help="analyze observed (default) or true states")
    if window:
        p.add_argument("--window", type=int, help="sliding window W (default 2000)")
    p.add_argument("--stride", type=int, help="sliding emission stride (default 100)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="infosig", description="Information-signature monitoring of transition streams.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate-train", help="train the tabular agent and log every transition")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--out", required=True)
    p.add_argument("--preset", choices=sorted(simlab.PRESETS), default="learning")
    p.add_argument("--policy-out", help="where to save the trained agent (default: <out>.policy.npz)")

    p = sub.add_parser("simulate-deploy", help="run a frozen policy with optional fault injection")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--fault", choices=("none", "obs", "act"), default="none")
    p.add_argument("--sigma2", type=float, default=0.1)
    p.add_argument("--onset", type=int, default=10_000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="emit a signature CSV")
    p.add_argument("--log", required=True)
    p.add_argument("--mode", choices=("cumulative", "sliding"), default="sliding")
    p.add_argument("--boundary", type=int, help="cumulative snapshot interval B (default 5000)")
    p.add_argument("--out", required=True)
    _analysis_flags(p)

    p = sub.add_parser("baseline", help="capture a baseline from a healthy segment")
    p.add_argument("--log", required=True)
    p.add_argument("--from-step", type=int, required=True)
    p.add_argument("--to-step", type=int, required=True)
    p.add_argument("--out", required=True)
    _analysis_flags(p)

    p = sub.add_parser("diagnose", help="sliding analysis, delta, classification and severity")
    p.add_argument("--log", required=True)
    p.add_argument("--baseline", required=True)
    p.add_argument("--out", help="write the report as JSON")
    p.add_argument("--thresholds", choices=sorted(monitor.THRESHOLD_PRESETS))
    _analysis_flags(p, window=False)
    return ap


def _require_file(path: str) -> None:
    if not Path(path).is_file():
        raise _UsageError(f"no such file: {path}")


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name in ("log", "policy", "baseline", "config"):
            if getattr(args, name, None):
                _require_file(getattr(args, name))
        if args.command == "baseline" and args.from_step > args.to_step:
            raise _UsageError("--from-step must not exceed --to-step")
    except _UsageError as exc:
        print(f"infosig: usage error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "simulate-train":
            res = simlab.run_training(args.seed, args.steps, preset=args.preset)
            write_log(res.log, args.out)
            res.agent.save(args.policy_out or f"{args.out}.policy.npz")
        elif args.command == "simulate-deploy":
            agent = simlab.TabularAgent.load(args.policy)
            spec = simlab.deployment_noise(args.fault, args.sigma2, args.onset)
            write_log(simlab.run_deployment(args.seed, agent, args.steps, spec), args.out)
        elif args.command == "analyze":
            cfg = _config_from_args(args)
            emit_csv(analyze(args.log, cfg, args.mode), args.out)
        elif args.command == "baseline":
            cfg = _config_from_args(args)
            save_baseline(build_baseline(args.log, cfg, args.from_step, args.to_step), args.out)
        elif args.command == "diagnose":
            cfg = _config_from_args(args)
            rep = run_diagnosis(args.log, load_baseline(args.baseline), cfg)
            if args.out:
                save_report(rep, args.out)
            print(format_report(rep))
    except (ValueError, OSError, KeyError) as exc:
        print(f"infosig: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
