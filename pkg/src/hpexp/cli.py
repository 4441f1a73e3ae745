"""Command-line front end: exports polynomials, arcs, measures, potentials,
zeros and asymptotic error tables, and runs tolerance checks."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import mpmath as mp

from . import asymptotics as asy
from . import checks
from . import exact
from . import potentials as pot
from . import zeros as zmod
from .curves import REGIONS, build_geometry
from .surface import OnCutError


@dataclass
class RunConfig:
    precision_bits: int = 192
    trace_tol: float = 1e-9
    radius: float = 50.0
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.trace_tol <= 0 or self.radius <= 0:
            raise ValueError("tolerances must be positive")

    def geometry(self):
        return build_geometry(self.trace_tol, self.radius)


def _digits(bits):
    return max(15, int(bits * math.log10(2)))


def _num(x, bits):
    return mp.nstr(mp.mpf(x), _digits(bits), strip_zeros=False) if bits > 53 else repr(float(x))


def _emit(cfg: RunConfig, name: str, text: str):
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
        return
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, name), "w", newline="") as fh:
        fh.write(text)


def _rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dump(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _ints(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _box(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 4 or vals[0] >= vals[1] or vals[2] >= vals[3]:
        raise argparse.ArgumentTypeError("box is x0,x1,y0,y1 with x0<x1, y0<y1")
    return vals


# --- subcommands -------------------------------------------------------------

def cmd_polys(args, cfg):
    out = []
    for n in args.n:
        if n < 1:
            raise SystemExit("n must be >= 1")
        if args.indices:
            idx = _ints(args.indices)
            if len(idx) != 3 or min(idx) < 0:
                raise SystemExit("--indices needs three nonnegative integers")
            t = exact.solve_hp_system(*idx)
        else:
            t = exact.residue_polynomials(n)
        out.append(t)
    if args.format == "json":
        _emit(cfg, "polys.json", _dump([t.to_json() for t in out]))
    else:
        rows = []
        for t in out:
            for name in "pqr":
                for k, c in enumerate(getattr(t, name).to_strings()):
                    rows.append([t.n1, t.n2, t.n3, name.upper(), k, c])
        _emit(cfg, "polys.csv", _rows_to_csv(["n1", "n2", "n3", "poly", "k", "coeff"], rows))
    return 0


def cmd_curves(args, cfg):
    geom = cfg.geometry()
    names = args.arcs.split(",") if args.arcs else sorted(geom.arcs)
    unknown = [a for a in names if a not in geom.arcs]
    if unknown:
        raise SystemExit(f"unknown arcs: {','.join(unknown)}")
    if args.format == "json":
        data = {"ystar": repr(geom.ystar), "arcs": {}}
        for a in names:
            arc = geom.arcs[a]
            data["arcs"][a] = [[repr(float(z.real)), repr(float(z.imag))] for z in arc.z]
        _emit(cfg, "curves.json", _dump(data))
        return 0
    parts = []
    for i, a in enumerate(names):
        txt = geom.arcs[a].to_csv()
        parts.append(txt if i == 0 else txt.split("\n", 1)[1])
    parts.append(f"ystar,0,0,{geom.ystar!r},0,0\n")
    _emit(cfg, "curves.csv", "".join(parts))
    return 0


def cmd_measures(args, cfg):
    geom = cfg.geometry()
    rows = []
    for which in ("P", "Q", "R", "Pstar", "Rstar"):
        for c, m in pot.piece_masses(which, geom).items():
            rows.append([which, c, repr(float(m))])
        rows.append([which, "total", repr(float(pot.mu_total_mass(which, geom)))])
    if args.format == "json":
        _emit(cfg, "measures.json", _dump([dict(zip(("measure", "carrier", "mass"), r)) for r in rows]))
    else:
        _emit(cfg, "measures.csv", _rows_to_csv(["measure", "carrier", "mass"], rows))
    return 0


def cmd_potentials(args, cfg):
    geom = cfg.geometry()
    x0, x1, y0, y1 = args.box or (-2.0, 2.0, -2.0, 2.0)
    N = args.grid
    rows = []
    for i in range(N):
        for j in range(N):
            z = complex(x0 + (x1 - x0) * (i + 0.5) / N, y0 + (y1 - y0) * (j + 0.5) / N)
            tag = geom.classify(z)
            if tag.region == "on_curve" or z == 0:
                continue
            try:
                vals = [pot.g(z, w, geom, tag.region).value for w in "PQR"]
                vals.append(pot.g_E(z, geom, tag.region))
                vals += [pot.phi(z, w, geom).value for w in "PR"]
            except (OnCutError, ZeroDivisionError):
                continue
            row = [repr(z.real), repr(z.imag), tag.region]
            for v in vals:
                row += [repr(v.real), repr(v.imag)]
            rows.append(row)
    head = ["re_z", "im_z", "region"]
    for nm in ("gP", "gQ", "gR", "gE", "phiP", "phiR"):
        head += [f"re_{nm}", f"im_{nm}"]
    if args.format == "json":
        _emit(cfg, "potentials.json", _dump([dict(zip(head, r)) for r in rows]))
    else:
        _emit(cfg, "potentials.csv", _rows_to_csv(head, rows))
    return 0


def cmd_zeros(args, cfg):
    tgt = (args.target or "q").upper()
    if tgt not in ("P", "Q", "R", "E"):
        raise SystemExit("--target is one of p, q, r, e")
    sets = []
    for n in args.n:
        if tgt == "E":
            sets.append(zmod.entire_zeros_in_box(n, args.box or (-2.0, 2.0, -2.0, 2.0),
                                                 max(cfg.precision_bits, 256)))
        else:
            sets.append(zmod.polynomial_zeros(n, tgt, cfg.precision_bits))
    if args.format == "json":
        data = [{"target": s.target, "n": s.n, "precision_bits": cfg.precision_bits,
                 "zeros": [[_num(z.real, cfg.precision_bits), _num(z.imag, cfg.precision_bits)]
                           for z in s.zeros],
                 "residuals": [f"{r:.3e}" for r in s.residuals]} for s in sets]
        _emit(cfg, f"zeros_{tgt.lower()}.json", _dump(data))
    else:
        text = "target,n,re,im,residual\n" + "".join(s.to_csv().split("\n", 1)[1] for s in sets)
        _emit(cfg, f"zeros_{tgt.lower()}.csv", text)
    return 0


ASYM_POINTS = (2.0, -2.0, -0.3, 0.3, 2j, -0.45 + 0.05j, -1.5)


def cmd_asym(args, cfg):
    geom = cfg.geometry()
    targets = [t.upper() for t in (args.target or "p,q,r,e").split(",")]
    rows = asy.error_rows(ASYM_POINTS, args.n, targets, ("strong", "two_term"), geom,
                          max(cfg.precision_bits, 256))
    if args.format == "json":
        keys = ("target", "regime", "n", "re_z", "im_z", "rel_err")
        _emit(cfg, "asym.json", _dump([dict(zip(keys, r)) for r in rows]))
    else:
        _emit(cfg, "asym.csv", asy.error_csv(rows))
    return 0


def _run_checks(topics, cfg):
    geom = cfg.geometry()
    results = []
    for t in topics:
        fn = checks.TOPICS[t]
        res = fn(geom)
        for r in res:
            r["topic"] = t
        results += res
    return results


def cmd_check(args, cfg):
    topics = [args.topic] if args.topic != "all" else list(checks.TOPICS)
    results = _run_checks(topics, cfg)
    failed = [r for r in results if not r["ok"]]
    for r in results:
        print(f"{'PASS' if r['ok'] else 'FAIL'} {r['topic']}:{r['check']} "
              f"value={r['value']:.3e} tol={r['tolerance']:.1e}")
    if failed:
        _emit(RunConfig(cfg.precision_bits, cfg.trace_tol, cfg.radius, cfg.out or "."),
              "check_failures.json", _dump(failed))
        return 1
    return 0


def cmd_report(args, cfg):
    geom = cfg.geometry()
    results = _run_checks(list(checks.TOPICS), cfg)
    summary = {"ystar": repr(geom.ystar), "precision_bits": cfg.precision_bits,
               "checks": results, "regions": list(REGIONS),
               "c1": [repr(asy.c1_closed_form().real), repr(asy.c1_closed_form().imag)]}
    _emit(cfg, "report.json", _dump(summary))
    return 0 if all(r["ok"] for r in results) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="hpexp", description=__doc__)
    p.add_argument("--precision-bits", type=int, default=192)
    p.add_argument("--out", default=None, help="output directory (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, n_default="1"):
        sp.add_argument("--n", type=_ints, default=_ints(n_default))
        sp.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
        sp.add_argument("--precision-bits", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--out", default=argparse.SUPPRESS)
        return sp

    sp = common(sub.add_parser("polys", help="exact coefficients"))
    sp.add_argument("--indices", default=None, help="n1,n2,n3 for a general triple")
    sp.set_defaults(func=cmd_polys)
    sp = common(sub.add_parser("curves", help="traced arcs"))
    sp.add_argument("--arcs", default=None)
    sp.set_defaults(func=cmd_curves)
    sp = common(sub.add_parser("measures", help="measure masses"))
    sp.set_defaults(func=cmd_measures)
    sp = common(sub.add_parser("potentials", help="g and phi on a grid"))
    sp.add_argument("--box", type=_box, default=None)
    sp.add_argument("--grid", type=int, default=21)
    sp.set_defaults(func=cmd_potentials)
    sp = common(sub.add_parser("zeros", help="zeros of P_n, Q_n, R_n or E_n"), "20")
    sp.add_argument("--target", default="q")
    sp.add_argument("--box", type=_box, default=None)
    sp.set_defaults(func=cmd_zeros)
    sp = common(sub.add_parser("asym", help="asymptotic error table"), "16,24,32,40")
    sp.add_argument("--target", default=None)
    sp.set_defaults(func=cmd_asym)
    sp = common(sub.add_parser("check", help="tolerance checks"))
    sp.add_argument("topic", choices=("identities", "masses", "asymptotics", "airy", "all"))
    sp.set_defaults(func=cmd_check)
    sp = common(sub.add_parser("report", help="all checks into report.json"))
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.precision_bits, out=args.out)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except SystemExit as e:
        if isinstance(e.code, str):
            print(f"error: {e.code}", file=sys.stderr)
            return 2
        raise
    except (ValueError, ArithmeticError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
