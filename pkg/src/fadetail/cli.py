"""Command-line front end.

Exit codes: 0 ok, 2 bad configuration, 3 numerical failure, 4 validation failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, diversity, montecarlo
from .models import (
    LN_SHIFT_A,
    ChannelModel,
    DomainError,
    KappaMuAlpha,
    LogNormal,
    QuadratureError,
    UnsupportedModelError,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class NumericFailure(Exception):
    pass


# --- parsing -------------------------------------------------------------

def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` in dB, stop included when it lands on the step."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"grid must look like start:stop:step, got {text!r}") from exc
    if not step > 0:
        raise ConfigError(f"grid step must be > 0, got {step}")
    if not start < stop:
        raise ConfigError(f"grid start must be below stop, got {start} >= {stop}")
    k = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(k + 1)


def parse_model(text: str) -> ChannelModel:
    try:
        src = text.strip()
        if not src.startswith("{"):
            src = Path(text).read_text()
        obj = json.loads(src)
        return ChannelModel.from_json(obj)
    except (OSError, json.JSONDecodeError, DomainError, TypeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read model {text!r}: {exc}") from exc


def parse_branches(texts: list[str]) -> tuple[list[ChannelModel], str | None]:
    """Branches from repeated --model flags or one {"branches": [...], "scheme": ...} object."""
    if len(texts) == 1:
        src = texts[0].strip()
        try:
            if not src.startswith("{") and not src.startswith("["):
                src = Path(texts[0]).read_text()
            obj = json.loads(src)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read branches {texts[0]!r}: {exc}") from exc
        if isinstance(obj, list) or (isinstance(obj, dict) and "branches" in obj):
            items = obj if isinstance(obj, list) else obj["branches"]
            scheme = obj.get("scheme") if isinstance(obj, dict) else None
            try:
                return [ChannelModel.from_json(o) for o in items], scheme
            except (DomainError, TypeError, KeyError, ValueError) as exc:
                raise ConfigError(f"bad branch list: {exc}") from exc
    return [parse_model(t) for t in texts], None


# --- output --------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def render(columns: list[str], rows: list[list], config: dict, fmt: str, extra: dict | None = None) -> str:
    seed = config.get("seed")
    head = {"tool": "fadetail", "version": __version__, "config_hash": config_hash(config),
            "seed": seed}
    if fmt == "json":
        doc = {"header": head, "config": config, "columns": columns,
               "rows": [[None if v is None else (v if isinstance(v, (str, bool)) else _json_num(v))
                         for v in r] for r in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# fadetail {__version__} config={head['config_hash']} seed={'none' if seed is None else seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_num(v):
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- evaluation helpers --------------------------------------------------

def _optional(fn, *args):
    """Value or None when the quantity is undefined at this point."""
    try:
        return fn(*args)
    except (UnsupportedModelError, DomainError, NotImplementedError):
        return None


def _exact(model, P, label):
    try:
        est = model.cdf_estimate(P)
    except (QuadratureError, OverflowError, FloatingPointError) as exc:
        raise NumericFailure(f"{model.name}: exact CDF failed at {label}: {exc}") from exc
    return est.value


def _powers(model, grid_dB, absolute):
    A = model.mean_power()
    P = 10.0 ** (grid_dB / 10.0)
    return P if absolute else P * A


def _base_config(args, models) -> dict:
    cfg = {"command": args.command, "models": [m.to_json() for m in models],
           "absolute": bool(getattr(args, "absolute", False)), "format": args.format}
    for key in ("grid", "eta", "seed", "n", "scheme", "chunk", "p_dB"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "eps", None):
        cfg["eps"] = list(args.eps)
    return cfg


# --- commands ------------------------------------------------------------

def cmd_tail(args) -> int:
    model = parse_model(args.model[0])
    if args.p_dB is None:
        raise ConfigError("tail needs --p-dB")
    P = float(_powers(model, np.array([args.p_dB]), args.absolute)[0])
    law = model.power_law()
    label = f"{args.p_dB} dB"
    exact = _exact(model, P, label)
    tail = _optional(model.tail_approx, P)
    phi = _optional(model.phi, P)
    cols = ["p_dB", "P_R", "eps_exact", "eps_tail", "phi", "local_slope", "alpha_offset", "beta_slope"]
    row = [10 * math.log10(P / model.mean_power()), P, exact, tail, phi, _optional(model.local_slope, P),
           None if law is None else law.alpha_offset, None if law is None else law.beta_slope]
    emit(render(cols, [row], _base_config(args, [model]), args.format), args.out)
    return EXIT_OK


def curve_rows(model: ChannelModel, grid_dB: np.ndarray, absolute: bool = False):
    A = model.mean_power()
    heuristic = isinstance(model, KappaMuAlpha)
    cols = ["p_dB", "eps_exact", "eps_tail", "phi", "local_slope"]
    if heuristic:
        cols.append("eps_heuristic")
    rows = []
    for g, P in zip(grid_dB, _powers(model, grid_dB, absolute)):
        p_dB = 10 * math.log10(P / A)
        row = [p_dB, _exact(model, float(P), f"p = {p_dB:.6g} dB"),
               _optional(model.tail_approx, float(P)), _optional(model.phi, float(P)),
               _optional(model.local_slope, float(P))]
        if heuristic:
            row.append(model.tail_approx_heuristic(float(P)))
        rows.append(row)
    return cols, rows


def cmd_curve(args) -> int:
    model = parse_model(args.model[0])
    if args.grid is None:
        raise ConfigError("curve needs --grid")
    cols, rows = curve_rows(model, parse_grid(args.grid), args.absolute)
    emit(render(cols, rows, _base_config(args, [model]), args.format), args.out)
    return EXIT_OK


def cmd_invert(args) -> int:
    model = parse_model(args.model[0])
    if not args.eps:
        raise ConfigError("invert needs at least one --eps")
    A = model.mean_power()
    rows = []
    for e in args.eps:
        try:
            P = model.invert_tail(e)
        except UnsupportedModelError as exc:
            raise ConfigError(str(exc)) from exc
        except DomainError as exc:
            raise ConfigError(f"{model.name}: {exc}") from exc
        rows.append([e, P, 10 * math.log10(P / A) if P > 0 else -math.inf, model.tail_approx(P)])
    emit(render(["eps", "P_R", "p_dB", "eps_tail_check"], rows, _base_config(args, [model]), args.format),
         args.out)
    return EXIT_OK


def validation_checks(model: ChannelModel, eta: float) -> tuple[list[dict], float | None]:
    """Pass/fail checks for one model; returns (checks, validity bound or None)."""
    checks = []
    A = model.mean_power()

    def add(name, ok, detail):
        checks.append({"check": name, "pass": bool(ok), "detail": detail})

    try:
        bound = model.validity_bound(eta)
    except UnsupportedModelError:
        bound = None

    if bound is not None:
        t = eta / (1 + eta)
        phi_b = model.phi(bound)
        add("validity_bound_roundtrip", abs(phi_b - t) <= 1e-10 * t,
            f"bound {bound:.10g} (p = {bound / A:.6g}), phi(bound) = {phi_b:.12g}, target {t:.12g}")
        top = model.validity_bound(1.0)
        lo = max(1e-10 * A, model.power_law().valid_from * (1 + 1e-12)) if model.power_law() else 1e-10 * A
        worst = None
        for P in np.geomspace(lo, top, 20):
            P = float(P)
            exact, tail, phi = model.cdf(P), model.tail_approx(P), model.phi(P)
            if not (tail * (1 - phi) - 1e-12 <= exact <= tail * (1 + phi) + 1e-12):
                worst = f"fails at p = {P / A:.6g}: eps {exact:.6g} outside {tail:.6g}(1 +- {phi:.3g})"
                break
        add("sandwich", worst is None, worst or f"20 points up to p = {top / A:.6g}")
        bad = None
        for P in np.geomspace(lo, bound, 20):
            r = model.cdf(float(P)) / model.tail_approx(float(P))
            if not (1 - eta <= r <= 1 + eta):
                bad = f"ratio {r:.6g} at p = {P / A:.6g}"
                break
        add("ratio_within_eta", bad is None, bad or f"eps/eps_tail within 1 +- {eta} below the bound")
    elif isinstance(model, LogNormal):
        worst = 0.0
        for e in np.geomspace(1e-12, 1e-2, 41):
            P = model.invert_tail(float(e))
            worst = max(worst, abs(model.tail_approx(P) / model.cdf(P) - 1))
        add("lognormal_accuracy", worst <= 0.15,
            f"phi unavailable; LN accuracy claim checked instead: max |eps_tail/eps - 1| = {worst:.4g} "
            f"over 1e-12..1e-2 with a = {LN_SHIFT_A}")
    else:
        P = 1e-8 * A
        tail = _optional(model.tail_approx, P)
        if tail is None:
            add("ratio_at_1e-8", True, "no tail approximation at p = 1e-8; skipped")
        else:
            r = _exact(model, P, "p = 1e-8") / tail
            add("ratio_at_1e-8", abs(r - 1) <= eta, f"phi unavailable; eps/eps_tail = {r:.8g} at p = 1e-8")

    errs, limited = [], []
    for e in (1e-9, 1e-6, 1e-3):
        try:
            P = model.invert_tail(e)
        except (UnsupportedModelError, DomainError):
            continue
        err = abs(model.tail_approx(P) / e - 1)
        if err > 1e-9 and _bracketed(model, P, e):
            # no double closer to the answer exists; count it as resolution-limited
            limited.append(e)
            err = 0.0
        errs.append(err)
    if errs:
        note = f"; limited by float spacing at eps = {limited}" if limited else ""
        add("inversion_roundtrip", max(errs) <= 1e-9, f"max relative error {max(errs):.3g}{note}")
    return checks, bound


def _bracketed(model, P, eps):
    """True when eps lies between the tail values at the doubles next to P."""
    vals = []
    for q in (math.nextafter(P, 0.0), math.nextafter(P, math.inf)):
        v = _optional(model.tail_approx, q)
        vals.append(0.0 if v is None else v)
    return min(vals) <= eps <= max(vals)


def cmd_validate(args) -> int:
    model = parse_model(args.model[0])
    eta = 0.1 if args.eta is None else args.eta
    if not eta > 0:
        raise ConfigError(f"eta must be > 0, got {eta}")
    args.eta = eta
    try:
        checks, bound = validation_checks(model, eta)
    except (QuadratureError, OverflowError) as exc:
        raise NumericFailure(f"{model.name}: {exc}") from exc
    ok = all(c["pass"] for c in checks)
    rows = [[c["check"], c["pass"], c["detail"]] for c in checks]
    extra = {"model": model.to_json(), "eta": eta, "validity_bound": bound,
             "validity_bound_rel": None if bound is None else bound / model.mean_power(), "pass": ok}
    emit(render(["check", "pass", "detail"], rows, _base_config(args, [model]), args.format, extra), args.out)
    if not ok:
        first = next(c for c in checks if not c["pass"])
        print(f"validation failed: {first['check']}: {first['detail']}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _check_mc_args(args):
    if args.grid is None:
        raise ConfigError(f"{args.command} needs --grid")
    if args.n is None or args.n < 1:
        raise ConfigError(f"--n must be >= 1, got {args.n}")
    if args.seed is None:
        args.seed = 0
    if not 0 <= args.seed < 2 ** 64:
        raise ConfigError("--seed must be an unsigned 64-bit integer")
    if args.chunk < 1:
        raise ConfigError("--chunk must be >= 1")


def cmd_mc(args) -> int:
    model = parse_model(args.model[0])
    _check_mc_args(args)
    P = _powers(model, parse_grid(args.grid), args.absolute)
    spec = montecarlo.SampleSpec(model, args.n, args.seed, args.chunk)
    tail = montecarlo.estimate_tail(spec, P, workers=args.workers)
    cols = ["threshold_dB", "count", "n", "eps_hat", "ci95", "eps_exact", "eps_tail"]
    rows = []
    for (t_dB, c, n, e, h), Pj in zip(tail.rows(), P):
        rows.append([t_dB, c, n, e, h, _exact(model, float(Pj), f"{t_dB:.6g} dB"),
                     _optional(model.tail_approx, float(Pj))])
    emit(render(cols, rows, _base_config(args, [model]), args.format), args.out)
    return EXIT_OK


def cmd_diversity(args) -> int:
    models, scheme_txt = parse_branches(args.model)
    try:
        bs = diversity.BranchSet(models)
        scheme = diversity.DiversityScheme.parse(args.scheme or scheme_txt or "MRC")
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    args.scheme = scheme.value
    _check_mc_args(args)
    A1 = models[0].mean_power()
    grid = parse_grid(args.grid)
    P = 10.0 ** (grid / 10.0) * (1.0 if args.absolute else A1)
    tail = montecarlo.simulate_diversity(bs, scheme, args.n, args.seed, P, chunk=args.chunk,
                                         workers=args.workers)
    laws = [m.power_law() for m in models]
    plain = all(law is not None and law.valid_from == 0 for law in laws)
    cols = ["threshold_dB", "count", "n", "eps_hat", "ci95", "sc_exact", "mrc_powerlaw", "mrc_generic",
            "mrc_generic_tail"]
    rows = []
    for (t_dB, c, n, e, h), Pj in zip(tail.rows(), P):
        Pj = float(Pj)
        try:
            sc = diversity.sc_outage(bs, Pj)
        except (QuadratureError, OverflowError) as exc:
            raise NumericFailure(f"diversity: branch CDF failed at {t_dB:.6g} dB: {exc}") from exc
        rows.append([t_dB, c, n, e, h, sc,
                     diversity.mrc_outage_powerlaw(laws, Pj) if plain else None,
                     _optional(diversity.mrc_outage_generic, bs, Pj),
                     _optional(lambda b, x: diversity.mrc_outage_generic(b, x, tails=True), bs, Pj)])
    emit(render(cols, rows, _base_config(args, models), args.format), args.out)
    return EXIT_OK


COMMANDS = {"tail": cmd_tail, "curve": cmd_curve, "invert": cmd_invert, "validate": cmd_validate,
            "mc": cmd_mc, "diversity": cmd_diversity}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fadetail", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fadetail {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "tail": "exact and approximate outage at one level",
        "curve": "outage curve over a dB grid",
        "invert": "threshold that meets a target outage",
        "validate": "check the tail approximation against its bounds",
        "mc": "Monte Carlo tail with analytic overlay",
        "diversity": "SC/MRC outage of several branches with Monte Carlo",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--model", action="append", required=True,
                       help='JSON {"model": ..., "params": {...}} or a path to one (repeat for branches)')
        s.add_argument("--out", help="output path (stdout if omitted)")
        s.add_argument("--format", choices=("csv", "json"), default="csv" if name != "validate" else "json")
        s.add_argument("--absolute", action="store_true", help="grid values are absolute P_R in dB")
        if name in ("curve", "mc", "diversity"):
            s.add_argument("--grid", help="start:stop:step in dB of P_R/A (use --grid=-60:0:1)")
        if name == "tail":
            s.add_argument("--p-dB", dest="p_dB", type=float, help="level in dB of P_R/A")
        if name == "invert":
            s.add_argument("--eps", type=float, action="append", help="target outage (repeatable)")
        if name == "validate":
            s.add_argument("--eta", type=float, help="relative tolerance (default 0.1)")
        if name in ("mc", "diversity"):
            s.add_argument("--n", type=int, default=10 ** 6, help="number of samples")
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--chunk", type=int, default=montecarlo.DEFAULT_CHUNK)
            s.add_argument("--workers", type=int, default=1, help="worker processes (output does not depend on it)")
        if name == "diversity":
            s.add_argument("--scheme", type=str.upper, choices=("SC", "MRC"))
    return p


def _join_negative(argv: list[str]) -> list[str]:
    # let "--grid -60:0:1" and "--p-dB -30" through argparse
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--grid", "--p-dB") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _join_negative(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QuadratureError, OverflowError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
