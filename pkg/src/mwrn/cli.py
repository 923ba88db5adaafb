"""Command-line front end: sweeps, figure datasets and reports."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields, replace

from . import __version__
from . import analytics as an
from .config import ConfigError, SimConfig
from .experiment import BerPoint, run_sweep

METRICS = ("avg_ber", "p_k", "penalty_db")
SOURCES = ("simulated", "analytic_exact", "analytic_asymptotic", "paper_verbatim")
FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

# config-file keys (long flag names) -> SimConfig fields
_KEYS = {
    "users": "users",
    "protocol": "protocol",
    "channel": "channel",
    "snr": "snr_grid_db",
    "frames": "frames",
    "trials": "frames",
    "bits-per-frame": "bits_per_frame",
    "seed": "seed",
    "observer": "observer",
    "bc-reuse-mac-channel": "bc_reuse_mac_channel",
    "engine": "engine",
}
_REQUIRED = ("users", "protocol", "snr_grid_db")


# -- output rows -----------------------------------------------------------------


@dataclass(frozen=True)
class OutputRow:
    snr_db: float | None
    users: int
    protocol: str
    channel: str
    metric: str
    k: int | None
    source: str
    value: float
    ci_low: float | None
    ci_high: float | None
    seed: int | None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")

    def to_record(self) -> list[str]:
        return [_fmt(getattr(self, f.name)) for f in fields(self)]

    @classmethod
    def from_record(cls, record: list[str]) -> "OutputRow":
        if len(record) != len(COLUMNS):
            raise ValueError(f"expected {len(COLUMNS)} columns, got {len(record)}")
        v = dict(zip(COLUMNS, record))
        return cls(
            snr_db=_opt(v["snr_db"], float),
            users=int(v["users"]),
            protocol=v["protocol"],
            channel=v["channel"],
            metric=v["metric"],
            k=_opt(v["k"], int),
            source=v["source"],
            value=float(v["value"]),
            ci_low=_opt(v["ci_low"], float),
            ci_high=_opt(v["ci_high"], float),
            seed=_opt(v["seed"], int),
        )


COLUMNS = tuple(f.name for f in fields(OutputRow))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _opt(s: str, typ):
    return None if s == "" else typ(s)


def write_csv(rows, stream, header_lines=()) -> None:
    for line in header_lines:
        stream.write(f"# {line}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.to_record())


def read_csv(text: str) -> list[OutputRow]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected header {header}")
    return [OutputRow.from_record(rec) for rec in reader]


# -- config parsing ----------------------------------------------------------------


def parse_snr(spec) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive), a comma list, or a list of numbers."""
    if isinstance(spec, (list, tuple)):
        try:
            return tuple(float(x) for x in spec)
        except (TypeError, ValueError):
            raise ConfigError("snr", f"grid values must be numbers, got {spec!r}") from None
    if isinstance(spec, (int, float)):
        return (float(spec),)
    text = str(spec).strip()
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, step, stop = parts
            if step <= 0 or stop < start:
                raise ConfigError("snr", f"need step > 0 and stop >= start in {text!r}")
            n = int(math.floor((stop - start) / step + 1e-9))
            return tuple(round(start + j * step, 10) for j in range(n + 1))
        return tuple(float(x) for x in text.split(","))
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError("snr", f"expected start:step:stop or a comma list, got {text!r}") from None


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("experiment")
    g.add_argument("--config", metavar="PATH", help="flat JSON file; flags override its values")
    g.add_argument("--users", type=int, help="number of users L (>= 2)")
    g.add_argument("--protocol", choices=("df", "af"))
    g.add_argument("--channel", choices=("awgn", "rayleigh"))
    g.add_argument("--snr", metavar="START:STEP:STOP", help="SNR per bit per user in dB")
    g.add_argument("--frames", "--trials", dest="frames", type=int, help="frames per SNR point")
    g.add_argument("--bits-per-frame", type=int, help="bits per user per frame (T)")
    g.add_argument("--seed", type=int)
    g.add_argument("--observer", type=int, help="observing user (default 1)")
    g.add_argument("--bc-reuse-mac-channel", action="store_true", default=None,
                   help="fading: BC link of the pair reuses its MAC coefficient")
    g.add_argument("--engine", choices=("dense", "rare"),
                   help="rare: simulate only decision-relevant noise (DF over AWGN)")
    g.add_argument("--output", metavar="PATH", help="write here instead of standard output")
    return p


def _load_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON in {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "file must hold a flat JSON object")
    out = {}
    for key, value in data.items():
        name = _KEYS.get(str(key).replace("_", "-"))
        if name is None:
            raise ConfigError(str(key), "unknown key")
        if isinstance(value, (dict, list)) and name != "snr_grid_db":
            raise ConfigError(str(key), "nested values are not allowed")
        out[name] = value
    return out


def parse_config(args) -> SimConfig:
    """Resolve a :class:`SimConfig` from flags (list or namespace) and an optional file."""
    if not isinstance(args, argparse.Namespace):
        args = argparse.ArgumentParser(parents=[_config_parent()]).parse_args(list(args))
    values = _load_file(args.config) if args.config else {}
    for flag, name in _KEYS.items():
        attr = flag.replace("-", "_")
        v = getattr(args, attr, None) if attr != "trials" else None
        if v is not None:
            values[name] = v
    for name in _REQUIRED:
        if name not in values:
            key = "snr" if name == "snr_grid_db" else name
            raise ConfigError(key, "missing required field")
    values["snr_grid_db"] = parse_snr(values["snr_grid_db"])
    for name in ("users", "frames", "bits_per_frame", "seed", "observer"):
        v = values.get(name)
        if isinstance(v, bool) or (v is not None and not isinstance(v, int)):
            raise ConfigError(name.replace("_", "-"), f"must be an integer, got {v!r}")
    return SimConfig(**values)


# -- row assembly -------------------------------------------------------------------


def _row(cfg: SimConfig, snr, metric, source, value, k=None, lo=None, hi=None, seeded=False) -> OutputRow:
    return OutputRow(
        snr_db=snr,
        users=cfg.users,
        protocol=cfg.protocol,
        channel=cfg.channel,
        metric=metric,
        k=k,
        source=source,
        value=float(value),
        ci_low=None if lo is None else float(lo),
        ci_high=None if hi is None else float(hi),
        seed=cfg.seed if seeded else None,
    )


def sweep_rows(cfg: SimConfig, points: list[BerPoint], ks=None) -> list[OutputRow]:
    rows = []
    L = cfg.users
    ks = range(1, L) if ks is None else [k for k in ks if 1 <= k < L]
    for pt in points:
        s = pt.snr_db
        rows.append(_row(cfg, s, "avg_ber", "simulated", pt.simulated_avg_ber, None, pt.ci_low, pt.ci_high, True))
        if pt.exact_avg_ber is not None:
            rows.append(_row(cfg, s, "avg_ber", "analytic_exact", pt.exact_avg_ber))
        seeded = cfg.channel == "rayleigh" and cfg.protocol == "af"
        rows.append(_row(cfg, s, "avg_ber", "analytic_asymptotic", pt.analytic_avg_ber, seeded=seeded))
        if pt.verbatim_avg_ber is not None:
            rows.append(_row(cfg, s, "avg_ber", "paper_verbatim", pt.verbatim_avg_ber))
        for k in ks:
            kp = pt.per_k[k]
            rows.append(_row(cfg, s, "p_k", "simulated", kp.simulated, k, kp.ci_low, kp.ci_high, True))
            if kp.exact is not None:
                rows.append(_row(cfg, s, "p_k", "analytic_exact", kp.exact, k))
            if kp.asymptotic is not None:
                rows.append(_row(cfg, s, "p_k", "analytic_asymptotic", kp.asymptotic, k))
            if cfg.channel == "awgn" and not math.isinf(s) and (k == 1 or (k == 2 and L >= 4)):
                fn = an.df_event_probability if cfg.protocol == "df" else an.af_event_probability
                v = fn(L, an.db_to_linear(s), cfg.observer, k, verbatim=True).value
                rows.append(_row(cfg, s, "p_k", "paper_verbatim", v, k))
    return rows


def penalty_rows(cfg: SimConfig) -> list[OutputRow]:
    gap = an.snr_gap(1e-5)
    return [
        _row(cfg, None, "penalty_db", "analytic_asymptotic", an.high_snr_asymptotics(1.0).penalty_db),
        _row(cfg, None, "penalty_db", "analytic_exact", gap.gap_db),
    ]


def _header(extra: dict) -> list[str]:
    return [f"mwrn {__version__}", "config: " + json.dumps(extra, sort_keys=True)]


def _emit(rows, header, output) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, header)
    text = buf.getvalue()
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def cmd_sweep(config: SimConfig, output: str | None = None) -> str:
    """Run the sweep and write its CSV; returns the CSV text."""
    rows = sweep_rows(config, run_sweep(config))
    return _emit(rows, _header(config.to_dict()), output)


def figure_configs(name: str, frames: int | None = None, bits_per_frame: int | None = None, seed: int = 1):
    """Preset configurations and the event orders to export for a figure."""
    if name not in FIGURES:
        raise ConfigError("figure", f"must be one of {FIGURES}, got {name!r}")
    common = {"seed": seed}
    if frames is not None:
        common["frames"] = frames
    if bits_per_frame is not None:
        common["bits_per_frame"] = bits_per_frame
    awgn = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0)
    fading = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    if name == "fig2":
        return [SimConfig(10, "df", awgn[:7], **common)], (1, 2, 3, 5, 7)
    if name == "fig3":
        return [SimConfig(10, "af", awgn, **common)], None
    if name in ("fig4", "fig5"):
        L = 10 if name == "fig4" else 100
        return [SimConfig(L, p, awgn, **common) for p in ("df", "af")], ()
    L = 10 if name == "fig6" else 50
    return [SimConfig(L, p, fading, channel="rayleigh", **common) for p in ("df", "af")], ()


def cmd_figure(name: str, output: str | None = None, frames: int | None = None,
               bits_per_frame: int | None = None, seed: int = 1) -> str:
    """CSV dataset (simulated and analytic series) behind one figure."""
    configs, ks = figure_configs(name, frames, bits_per_frame, seed)
    rows = []
    for cfg in configs:
        part = sweep_rows(cfg, run_sweep(cfg), ks)
        if name in ("fig2", "fig3"):
            part = [r for r in part if r.metric == "p_k"]
        rows.extend(part)
    if name in ("fig4", "fig5"):
        ref = replace(configs[0], users=2, observer=1)
        for proto, fn in (("df", an.p_df_twrn), ("af", an.p_af_twrn)):
            c = replace(ref, protocol=proto)
            rows.extend(_row(c, s, "avg_ber", "analytic_exact", fn(an.db_to_linear(s))) for s in c.snr_grid_db)
        rows.extend(penalty_rows(configs[0]))
    header = _header({"figure": name, "configs": [c.to_dict() for c in configs]})
    return _emit(rows, header, output)


def _ratio(a, b) -> str:
    if a is None or b is None or b == 0:
        return "-"
    return f"{a / b:.3f}"


def cmd_report(config: SimConfig, output: str | None = None) -> str:
    """Human-readable comparison of simulation and analytics."""
    points = run_sweep(config)
    L = config.users
    out = io.StringIO()
    w = out.write
    w(f"mwrn {__version__} report\n")
    w(f"L={L} protocol={config.protocol} channel={config.channel} observer={config.observer} "
      f"frames={config.frames} bits_per_frame={config.bits_per_frame} seed={config.seed} engine={config.engine}\n\n")
    w(f"{'snr_db':>7} {'simulated':>11} {'ci_low':>11} {'ci_high':>11} {'high_snr':>11} {'sim/hs':>7} "
      f"{'exact':>11} {'sim/ex':>7} {'literal':>11}\n")
    for pt in points:
        ex = "-" if pt.exact_avg_ber is None else f"{pt.exact_avg_ber:.4e}"
        vb = "-" if pt.verbatim_avg_ber is None else f"{pt.verbatim_avg_ber:.4e}"
        w(f"{pt.snr_db:>7.2f} {pt.simulated_avg_ber:>11.4e} {pt.ci_low:>11.4e} {pt.ci_high:>11.4e} "
          f"{pt.analytic_avg_ber:>11.4e} {_ratio(pt.simulated_avg_ber, pt.analytic_avg_ber):>7} "
          f"{ex:>11} {_ratio(pt.simulated_avg_ber, pt.exact_avg_ber):>7} {vb:>11}\n")
    w("\n")
    w(f"Asymptotic SNR penalty of AF relative to DF: {an.high_snr_asymptotics(1.0).penalty_db:.2f} dB\n")
    gap = an.snr_gap(1e-5)
    w(f"Exact two-way SNR gap at BER 1e-5: {gap.gap_db:.2f} dB "
      f"(DF {gap.df_snr_db:.2f} dB, AF {gap.af_snr_db:.2f} dB)\n")
    if config.protocol == "af":
        c_sum = float(an.af_average_coefficient(L))
        c_print = an.af_average_coefficient_verbatim(L)
        w(f"AF average-BER coefficient on P_AF: summation {c_sum:.4f}, literal closed form {c_print:.4f} "
          f"({100.0 * (c_print / c_sum - 1.0):+.2f}%)\n")
    else:
        flat = len({an.df_k_event(L, 0.01, config.observer, k).value for k in range(3, L)}) <= 1
        w(f"DF per-k flatness: high-SNR P(k) identical across k: {'yes' if flat else 'no'}\n")
        if config.channel == "awgn":
            for pt in points:
                ratios = [kp.simulated / kp.asymptotic for kp in pt.per_k.values() if kp.asymptotic]
                if ratios and pt.histogram.counts[1:].sum() > 0:
                    w(f"  {pt.snr_db:6.2f} dB: simulated P(k)/high-SNR P(k) spans "
                      f"[{min(ratios):.3f}, {max(ratios):.3f}] over k=1..{L - 1}\n")
    if config.channel == "rayleigh" and config.protocol == "df":
        w("Fading DF bound evaluated at pi/4; the literal variant is listed in the 'literal' column.\n")
    text = out.getvalue()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def build_parser() -> argparse.ArgumentParser:
    parent = _config_parent()
    parser = argparse.ArgumentParser(prog="mwrn", description="Multi-way relay network BER simulator and analytics.")
    parser.add_argument("--version", action="version", version=f"mwrn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[parent], help="run an SNR sweep and emit CSV")
    sub.add_parser("report", parents=[parent], help="simulation vs analytics summary")
    fig = sub.add_parser("figure", help="emit the dataset behind a figure")
    fig.add_argument("name", choices=FIGURES)
    fig.add_argument("--frames", "--trials", dest="frames", type=int)
    fig.add_argument("--bits-per-frame", type=int)
    fig.add_argument("--seed", type=int, default=1)
    fig.add_argument("--output", metavar="PATH")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "figure":
            cmd_figure(args.name, args.output, args.frames, args.bits_per_frame, args.seed)
        else:
            config = parse_config(args)
            (cmd_sweep if args.command == "sweep" else cmd_report)(config, args.output)
    except ConfigError as e:
        print(f"mwrn: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"mwrn: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
