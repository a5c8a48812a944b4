"""Command-line interface.

Exit codes: 0 success, 1 verification or audit failure, 2 usage or input
error. An optional ``--config FILE`` holds ``key=value`` lines named like
the long flags (``dist=exp:1``, ``abs-tol=1e-12``); flags given on the
command line win.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds as bd
from .distributions import parse_distribution
from .entropy import CrieMethod, crie
from .errors import (CrieError, DataFormatError, DegenerateWindow, InvalidParameter,
                     InvalidWindow, NonMonotoneTransform)
from .estimation import SampleData, bootstrap_gof
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .reference import LITERAL_SPECS, reproduce
from .shape import (certify_icrie_dcrie, classify_aging, classify_mrl,
                    expectation_label)
from .truncation import TruncatedView, Window, m1

#: largest spread between evaluation routes accepted by ``verify``
VERIFY_SPREAD = 1e-6

_INPUT_ERRORS = (InvalidParameter, InvalidWindow, DegenerateWindow, DataFormatError,
                 NonMonotoneTransform, OSError)


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ output

def _num(x):
    # 17 significant digits round-trip every double
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return x


def _render(rows, columns, fmt, footer=None):
    if fmt == "json":
        return json.dumps([{c: r.get(c) for c in columns} for r in rows], indent=1)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_num(r.get(c)) for c in columns])
        return buf.getvalue().rstrip("\n")
    widths = [max(len(c), *(len(_cell(r.get(c))) for r in rows)) if rows else len(c)
              for c in columns]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(_cell(r.get(c)).rjust(w) for c, w in zip(columns, widths)))
    if footer:
        lines.append("")
        lines.append(footer)
    return "\n".join(lines)


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    return "" if x is None else str(x)


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ------------------------------------------------------------------ parsing

def _cfg(args):
    return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol,
                            max_subdivisions=DEFAULT_CONFIG.max_subdivisions)


def _grid(text):
    """``lo:hi:n`` for an even grid, or a comma list of values."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            n = int(n)
            if n < 0:
                raise ValueError
            return np.linspace(float(lo), float(hi), n)
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise UsageError(f"cannot read grid {text!r}; use lo:hi:n or a comma list") from None


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return value


def _dist(args):
    return parse_distribution(_need(args, "dist"))


def _windows(args):
    raw = _need(args, "window")
    raw = raw if isinstance(raw, list) else [raw]
    return [Window.parse(w) for w in raw]


def _tau2(text):
    return math.inf if text.strip().lower() in ("inf", "+inf") else float(text)


# ----------------------------------------------------------------- commands

def cmd_table(args):
    results = reproduce(literal=args.literal_lomax, cfg=_cfg(args))
    rows = [{"distribution": r.cell.label, "spec": r.spec, "tau1": r.cell.tau1,
             "tau2": r.cell.tau2, "computed": r.computed,
             "published": r.cell.published, "deviation": r.deviation} for r in results]
    cols = ["distribution", "spec", "tau1", "tau2", "computed", "published", "deviation"]
    dev = [r.deviation for r in results]
    footer = (f"max deviation {max(dev):.3g}; "
              f"{sum(d <= 2e-4 for d in dev)}/{len(dev)} cells within 2e-4")
    if not args.literal_lomax:
        used = {r.cell.label: r.spec for r in results}
        for label, literal in LITERAL_SPECS.items():
            footer += (f"\ncolumn {label} evaluated as {used[label]}; "
                       f"--literal-lomax uses {literal}")
    _emit(args, _render(rows, cols, args.format, footer))
    return 0


def cmd_scan(args):
    dist = _dist(args)
    tau2 = _tau2(_need(args, "tau2"))
    grid = _grid(_need(args, "grid"))
    cfg = _cfg(args)
    cols = ["tau1", "m1", "H"] + (["sqrt_var", "log_sum"] if args.with_bounds else [])
    rows = []
    for t1 in grid:
        try:
            v = TruncatedView(dist, Window(float(t1), tau2))
        except (InvalidWindow, DegenerateWindow) as exc:
            print(f"warning: skipping tau1={t1:g}: {exc}", file=sys.stderr)
            continue
        row = {"tau1": float(t1), "m1": m1(v), "H": crie(v, cfg=cfg)}
        if args.with_bounds:
            row["sqrt_var"] = bd.bound_var(v, cfg).rhs
            row["log_sum"] = bd.bound_logsum_upper(v, cfg).rhs
        rows.append(row)
    _emit(args, _render(rows, cols, args.format))
    return 0


def cmd_bounds(args):
    dist = _dist(args)
    cfg = _cfg(args)
    out, failed = [], 0
    for w in _windows(args):
        reports = bd.audit(dist, w, cfg)
        bad = bd.violations(reports, include_disputed=args.count_disputed)
        failed += len(bad)
        out.append((w, reports))
    if args.format == "json":
        text = "\n".join(
            "\n".join(json.dumps({"window": str(w), **json.loads(line)})
                      for line in bd.to_json_lines(reports).splitlines())
            for w, reports in out)
    else:
        text = "\n\n".join(f"window {w}\n{bd.to_text_table(reports)}" for w, reports in out)
    _emit(args, text)
    if failed:
        print(f"{failed} bound(s) violated with hypotheses met", file=sys.stderr)
    return 1 if failed else 0


def cmd_verify(args):
    dist = _dist(args)
    cfg = _cfg(args)
    rows, worst = [], 0.0
    for w in _windows(args):
        v = TruncatedView(dist, w)
        vals = {m.value: crie(v, m, cfg) for m in CrieMethod}
        spread = max(vals.values()) - min(vals.values())
        worst = max(worst, spread)
        rows.append({"window": str(w), **vals, "spread": spread,
                     "ok": spread <= VERIFY_SPREAD})
    cols = ["window"] + [m.value for m in CrieMethod] + ["spread", "ok"]
    _emit(args, _render(rows, cols, args.format))
    return 0 if worst <= VERIFY_SPREAD else 1


def cmd_classify(args):
    dist = _dist(args)
    report = {"distribution": dist.text(), "aging": classify_aging(dist),
              "mrl": classify_mrl(dist), "expectation": expectation_label(dist)}
    if args.tau2 is not None:
        grid = _grid(args.grid) if args.grid else None
        cert = certify_icrie_dcrie(dist, _tau2(args.tau2), grid, cfg=_cfg(args))
        report["class"] = cert.to_dict()
    if args.format == "json":
        text = json.dumps(report, indent=1)
    else:
        lines = [f"{k}: {v}" for k, v in report.items() if k != "class"]
        if "class" in report:
            c = report["class"]
            lines.append(f"class at tau2={c['tau2']:g}: {c['verdict']} ({c['label']}); "
                         f"H scan {c['crie_scan']}, m1 scan {c['mrl_scan']}, "
                         f"derivative identity {c['identity_agrees']}")
        text = "\n".join(lines)
    _emit(args, text)
    return 0


def cmd_gof(args):
    data = SampleData.read(args.data)
    dist = _dist(args)
    (w,) = _windows(args)[:1]
    res = bootstrap_gof(data, dist, w, args.replicates, args.seed)
    decision = "reject" if res.reject(args.alpha) else "do not reject"
    row = {"statistic": res.statistic, "p_value": res.p_value,
           "replicates": res.replicates, "seed": res.seed, "alpha": args.alpha,
           "decision": decision}
    _emit(args, _render([row], list(row), args.format))
    return 0


# ------------------------------------------------------------------- parser

def _common(p, window_multi=False):
    p.add_argument("--dist", help="distribution, e.g. exp:1, lomax:2,1, betac:0.5")
    if window_multi:
        p.add_argument("--window", action="append", help="tau1:tau2 (repeatable)")
    else:
        p.add_argument("--window", help="tau1:tau2, tau2 may be inf")
    p.add_argument("--abs-tol", type=float, default=DEFAULT_CONFIG.abs_tol)
    p.add_argument("--rel-tol", type=float, default=DEFAULT_CONFIG.rel_tol)
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p.add_argument("--out", help="write output to FILE")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crie", description="Cumulative residual interval entropy toolkit.")
    parser.add_argument("--config", help="key=value file of default flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="recompute the published reference table")
    _common(p)
    p.add_argument("--literal-lomax", action="store_true",
                   help="read the Lomax(2,1) column literally")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("scan", help="m1 and H along a tau1 grid at fixed tau2")
    _common(p)
    p.add_argument("--tau2")
    p.add_argument("--grid", help="lo:hi:n or comma list of tau1 values")
    p.add_argument("--with-bounds", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bounds", help="audit every bound on one or more windows")
    _common(p, window_multi=True)
    p.add_argument("--count-disputed", action="store_true",
                   help="let disputed statements set the exit code")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="compare the four evaluation routes")
    _common(p, window_multi=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="aging labels and ICRIE/DCRIE certification")
    _common(p)
    p.add_argument("--tau2")
    p.add_argument("--grid", help="tau1 grid for certification")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gof", help="bootstrap CRIKL goodness-of-fit test")
    _common(p)
    p.add_argument("data", help="file of newline-delimited values")
    p.add_argument("--replicates", type=int, default=199)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_gof)
    return parser


def _read_config(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _apply_config(parser, argv, path):
    cfg = _read_config(path)
    # learn the chosen sub-parser and its actions
    probe = parser.parse_args(argv)
    sub = next(a for a in parser._actions
               if isinstance(a, argparse._SubParsersAction)).choices[probe.command]
    actions = {a.dest: a for a in sub._actions}
    defaults, appended = {}, {}
    for key, value in cfg.items():
        if key not in actions or key in ("help", "data"):
            raise UsageError(f"{path}: unknown key {key!r} for '{probe.command}'")
        a = actions[key]
        if isinstance(a, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(a, argparse._AppendAction):
            # argparse would extend a list default; fill it only when absent
            appended[key] = [v.strip() for v in value.split(",")]
        else:
            defaults[key] = a.type(value) if a.type else value
    sub.set_defaults(**defaults)
    args = parser.parse_args(argv)
    for key, value in appended.items():
        if getattr(args, key) is None:
            setattr(args, key, value)
    return args


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, args.config)
        return args.func(args)
    except UsageError as exc:
        print(f"crie: error: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"crie: error: {exc}", file=sys.stderr)
        return 2
    except CrieError as exc:
        print(f"crie: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
