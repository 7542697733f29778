"""Command-line front end.

Subcommands
-----------
shift         renormalised level spacings of one model
rate-curve    R(tau) for one approach, with the RWA rate and difference
zeno-map      Omega1 - s omega_c over an (A, s) grid of Ohmic-family spectra
oracle-check  overlap-integral rate against discretised-bath dynamics

Exit codes: 0 success, 2 configuration or I/O error, 3 numerical failure,
4 oracle check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import default_tau_grid
from .dynamics import DEFAULT_MODES, DEFAULT_REACH, discretize_bath, survival_after_measurements
from .errors import IntegrabilityError, NumericalError
from .rate import Approach, MeasurementProtocol, decay_rate, delta_R
from .renorm import AtomBathModel, compute_omega1_closed_form, delta_omega_map
from .spectra import OhmicFamily, hydrogen_preset, load_tabulated, zero_spectrum

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CHECK = 0, 2, 3, 4
OUTPUT_DIR_ENV = "ZENORATE_OUTPUT_DIR"


class ConfigError(Exception):
    pass


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def parse_ohmic(text: str) -> OhmicFamily:
    """``"A=1e-8,s=0.5,wc=500"`` -> OhmicFamily."""
    fields = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ConfigError(f"bad --ohmic entry {part!r}; expected key=value")
        k, v = (s.strip() for s in part.split("=", 1))
        fields[k.lower()] = v
    aliases = {"a": "A", "s": "s", "wc": "omega_c", "omega_c": "omega_c"}
    kwargs = {}
    for k, v in fields.items():
        if k not in aliases:
            raise ConfigError(f"unknown --ohmic key {k!r}; use A, s, wc")
        try:
            kwargs[aliases[k]] = float(v)
        except ValueError:
            raise ConfigError(f"--ohmic {k}={v!r} is not a number") from None
    kwargs.setdefault("omega_c", 500.0)
    if "A" not in kwargs or "s" not in kwargs:
        raise ConfigError("--ohmic needs at least A and s")
    return OhmicFamily(**kwargs)


def build_model(args) -> AtomBathModel:
    chosen = [x for x in (args.preset, args.ohmic, args.spectrum_file) if x]
    if len(chosen) > 1:
        raise ConfigError("choose one of --preset, --ohmic, --spectrum-file")
    if args.ohmic:
        spec, name = parse_ohmic(args.ohmic), f"ohmic({args.ohmic})"
    elif args.spectrum_file:
        spec, name = load_tabulated(args.spectrum_file, args.omega_scale), Path(args.spectrum_file).name
    else:
        preset = args.preset or "2p1s"
        if preset == "none":
            spec = zero_spectrum()
        elif preset in ("2p1s", "3p1s"):
            spec = hydrogen_preset(preset)
        else:
            raise ConfigError(f"unknown preset {preset!r}; use 2p1s, 3p1s or none")
        name = preset
    return AtomBathModel(spec, 1.0, name)


def _scale(args, model: Optional[AtomBathModel]) -> Optional[float]:
    """``Omega`` in rad/s when SI output is requested, else None."""
    if args.units == "reduced":
        return None
    scale = args.omega_scale or (model.spectrum.omega_scale if model else None)
    if not scale:
        raise ConfigError("--units si needs a physical scale; pass --omega-scale")
    return float(scale)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def _header(args, command: str) -> list[str]:
    skip = {"func", "command", "config"}
    items = sorted((k, v) for k, v in vars(args).items() if k not in skip and v is not None)
    lines = [f"zenorate {__version__} {command}"]
    lines += [f"{k} = {v}" for k, v in items]
    return lines


def _render_csv(columns, rows, header_lines) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _render_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _render_text(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {_fmt(v)}\n" for k, v in pairs)


def _emit(args, text: str, default_name: Optional[str] = None) -> None:
    target = args.output
    if target is None and default_name and os.environ.get(OUTPUT_DIR_ENV):
        target = os.path.join(os.environ[OUTPUT_DIR_ENV], default_name)
    if target in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {target}: {exc}") from None
    print(f"wrote {target}", file=sys.stderr)


def _tau_grid(args, model: AtomBathModel) -> np.ndarray:
    if args.tau is not None:
        grid = np.array(sorted(float(t) for t in str(args.tau).split(",") if t.strip()))
    elif args.tau_min is None and args.tau_max is None:
        grid = default_tau_grid(model.spectrum.omega_c, n=args.tau_count or 200)
    else:
        wc = model.spectrum.omega_c
        lo = args.tau_min if args.tau_min is not None else 1e-2 / wc
        hi = args.tau_max if args.tau_max is not None else 1e5 / wc
        n = args.tau_count or 200
        if n < 1:
            raise ConfigError("--tau-count must be >= 1")
        if not 0 < lo <= hi:
            raise ConfigError("need 0 < tau-min <= tau-max")
        if n == 1:
            grid = np.array([lo])
        elif args.tau_spacing == "linear":
            grid = np.linspace(lo, hi, n)
        else:
            grid = np.geomspace(lo, hi, n)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError("tau grid must be positive and strictly increasing")
    return grid


def cmd_shift(args) -> int:
    model = build_model(args)
    scale = _scale(args, model)
    k = scale or 1.0
    pairs = [
        ("model", model.name),
        ("omega0", model.omega0 * k),
        ("omega1", model.omega1 * k),
        ("omega_prime", model.omega_prime * k),
        ("shift1", model.shift1),
        ("shift_prime", model.shift_prime),
    ]
    spec = model.spectrum
    if isinstance(spec, OhmicFamily):
        closed = compute_omega1_closed_form(spec, model.omega0)
        shift = model.omega1 - model.omega0
        rel = abs(closed - model.omega1) / shift if shift else 0.0
        pairs += [("omega1_closed_form", closed * k), ("closed_form_rel_diff", rel)]
    pairs.append(("units", "rad/s" if scale else "Omega"))
    if args.format == "json":
        _emit(args, _render_json(dict(pairs)))
    elif args.format == "csv":
        _emit(args, _render_csv(["key", "value"], pairs, _header(args, "shift")))
    else:
        _emit(args, _render_text(pairs))
    return EXIT_OK


def cmd_rate_curve(args) -> int:
    model = build_model(args)
    scale = _scale(args, model)
    approach = Approach.parse(args.approach)
    grid = _tau_grid(args, model)
    k = scale or 1.0
    rows = []
    for tau in grid:
        p = decay_rate(model, float(tau), approach)
        rwa = p if approach is Approach.RWA else decay_rate(model, float(tau), Approach.RWA)
        d = delta_R(model, float(tau), approach)
        rows.append((tau / k, p.R * k, p.R0 * k, p.ratio, rwa.R * k, d * k, approach.value))
    columns = ["tau", "R", "R0", "ratio", "R_rwa", "delta_R", "approach"]
    name = f"rate_curve_{model.name}_{approach.value}.{'json' if args.format == 'json' else 'csv'}"
    if args.format == "json":
        payload = {
            "model": model.name,
            "approach": approach.value,
            "units": "si" if scale else "reduced",
            "columns": columns,
            "rows": [list(r) for r in rows],
        }
        _emit(args, _render_json(payload), name)
    else:
        _emit(args, _render_csv(columns, rows, _header(args, "rate-curve")), name)
    return EXIT_OK


def _float_list(text) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def cmd_zeno_map(args) -> int:
    if args.A_values:
        A = _float_list(args.A_values)
    else:
        A = list(np.geomspace(args.A_min, args.A_max, args.A_count))
    if args.s_values:
        s = _float_list(args.s_values)
    else:
        s = list(np.geomspace(args.s_min, args.s_max, args.s_count))
    if not A or not s:
        raise ConfigError("zeno-map needs non-empty A and s grids")
    if args.units == "si" and not args.omega_scale:
        raise ConfigError("--units si needs --omega-scale for zeno-map")
    k = float(args.omega_scale) if args.units == "si" else 1.0
    dmap = delta_omega_map(s, A, args.omega_c)
    rows = [(a, sv, dmap[i, j] * k) for i, a in enumerate(A) for j, sv in enumerate(s)]
    columns = ["A", "s", "delta_omega"]
    if args.format == "json":
        payload = {"omega_c": args.omega_c, "columns": columns, "rows": [list(r) for r in rows]}
        _emit(args, _render_json(payload), "zeno_map.json")
    else:
        _emit(args, _render_csv(columns, rows, _header(args, "zeno-map")), "zeno_map.csv")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    model = build_model(args)
    spec = model.spectrum
    wc = spec.omega_c
    approaches = (
        [Approach.I, Approach.II] if args.approach.lower() == "both" else [Approach.parse(args.approach)]
    )
    x_values = _float_list(args.tau_omega_c)
    omega_max = args.omega_max if args.omega_max is not None else DEFAULT_REACH * wc
    bath = discretize_bath(spec, args.modes, omega_max)
    rows = []
    ok = True
    for approach in approaches:
        for x in x_values:
            tau = x / wc
            protocol = MeasurementProtocol(tau, args.measurements)
            R = decay_rate(model, tau, approach).R
            P = survival_after_measurements(bath, approach, protocol, args.dt)
            R_oracle = -math.log(P) / protocol.total_time + 0.0 if P > 0 else math.inf
            if R == 0 and R_oracle == 0:
                rel = 0.0
            else:
                rel = abs(R_oracle - R) / abs(R) if R else math.inf
            passed = rel <= args.tolerance
            ok &= passed
            rows.append((approach.value, x, tau, R, R_oracle, rel, "PASS" if passed else "FAIL"))
    columns = ["approach", "tau_omega_c", "tau", "R_formula", "R_oracle", "rel_diff", "status"]
    diagnostic = (
        f"bath: N = {bath.N}, d_omega = {bath.d_omega:.6g}, omega_max = {bath.omega_max:.6g}; "
        f"narrowest kernel width 2 pi / tau = {2 * math.pi * wc / max(x_values):.6g}"
    )
    if args.format == "json":
        payload = {"columns": columns, "rows": [list(r) for r in rows], "passed": ok, "bath": diagnostic}
        _emit(args, _render_json(payload))
    elif args.format == "csv":
        _emit(args, _render_csv(columns, rows, _header(args, "oracle-check")))
    else:
        lines = ["  ".join(f"{c:>12}" for c in columns)]
        for r in rows:
            lines.append("  ".join(f"{_fmt(v):>12}" for v in r))
        lines.append(diagnostic)
        if not ok:
            lines.append(
                "oracle disagrees with the overlap integral beyond tolerance; "
                "refine the bath (more modes) if d_omega is not small against the kernel width"
            )
        lines.append("PASS" if ok else "FAIL")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def _add_model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--preset", choices=["2p1s", "3p1s", "none"], help="hydrogen preset or zero coupling")
    g.add_argument("--ohmic", metavar="A=..,s=..,wc=..", help="Ohmic-family spectrum")
    g.add_argument("--spectrum-file", help="two-column tabulated spectrum")
    g.add_argument("--omega-scale", type=float, help="Omega in rad/s for SI output or rad/s input files")


def _add_output_args(p, formats, default):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--units", choices=["reduced", "si"], default="reduced")
    p.add_argument("--output", "-o", help=f"output file (default stdout, or ${OUTPUT_DIR_ENV}/<name>)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenorate",
        description="Decay rates of a frequently measured two-level atom with and without the RWA.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="flat key = value file supplying option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shift", help="renormalised level spacings")
    _add_model_args(p)
    _add_output_args(p, ["text", "json", "csv"], "text")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("rate-curve", help="decay rate over a tau grid")
    _add_model_args(p)
    p.add_argument("--approach", default="I", help="RWA, I or II")
    p.add_argument("--tau", help="comma-separated tau values (units of 1/Omega)")
    p.add_argument("--tau-min", type=float)
    p.add_argument("--tau-max", type=float)
    p.add_argument("--tau-count", type=int)
    p.add_argument("--tau-spacing", choices=["log", "linear"], default="log")
    _add_output_args(p, ["csv", "json"], "csv")
    p.set_defaults(func=cmd_rate_curve)

    p = sub.add_parser("zeno-map", help="Omega1 - s omega_c over Ohmic (A, s) grids")
    p.add_argument("--omega-c", type=float, default=500.0)
    p.add_argument("--A-values", dest="A_values", help="comma-separated amplitudes")
    p.add_argument("--A-min", dest="A_min", type=float, default=1e-9)
    p.add_argument("--A-max", dest="A_max", type=float, default=1e-6)
    p.add_argument("--A-count", dest="A_count", type=int, default=7)
    p.add_argument("--s-values", help="comma-separated exponents")
    p.add_argument("--s-min", type=float, default=1e-3)
    p.add_argument("--s-max", type=float, default=2.0)
    p.add_argument("--s-count", type=int, default=13)
    p.add_argument("--omega-scale", type=float, help="Omega in rad/s for SI output")
    _add_output_args(p, ["csv", "json"], "csv")
    p.set_defaults(func=cmd_zeno_map)

    p = sub.add_parser("oracle-check", help="compare the rate formula with bath dynamics")
    _add_model_args(p)
    p.add_argument("--approach", default="both", help="I, II or both")
    p.add_argument("--tau-omega-c", default="0.3,1,3", help="comma-separated tau * omega_c values")
    p.add_argument("--modes", type=int, default=DEFAULT_MODES)
    p.add_argument("--omega-max", type=float, help=f"bath cutoff (default {DEFAULT_REACH:g} omega_c)")
    p.add_argument("--dt", type=float, help="RK4 step (default 0.1 / (omega_max + centre))")
    p.add_argument("--measurements", type=int, default=10)
    p.add_argument("--tolerance", type=float, default=0.05)
    _add_output_args(p, ["text", "json", "csv"], "text")
    p.set_defaults(func=cmd_oracle_check)
    parser._subparsers_map = sub.choices
    return parser


def parse_args(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        cfg = read_config(pre.config)
        subparser = parser._subparsers_map[pre.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**cfg)
        args = parser.parse_args(argv)
        for action in subparser._actions:
            value = getattr(args, action.dest, None)
            if action.choices and value is not None and value not in action.choices:
                raise ConfigError(f"config {action.dest} = {value!r} not in {sorted(action.choices)}")
        return args
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, IntegrabilityError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
