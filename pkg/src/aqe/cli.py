"""Command-line front end: ``aqe solve``, ``aqe check`` and ``aqe report``.

Exit codes: 0 pass, 1 check failed, 2 usage error, 3 missing input.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import asai, families, lfun, maass, periods, specfun
from .errors import AqeError
from .hypgeom import GeodesicBall

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_MISSING = 0, 1, 2, 3
COVERAGE_FILE = "coverage.json"


class UsageError(Exception):
    pass


class MissingInput(Exception):
    pass


# ------------------------------------------------------------------ config

@dataclass
class RunConfig:
    precision_mode: str = "standard"
    grid_nx: int = 64
    grid_ny: int = 64
    cache_dir: str = ""
    output: str = "csv"
    seed: int = 0

    def validate(self):
        if self.precision_mode not in ("standard", "extended"):
            raise UsageError(f"precision_mode must be standard or extended, not {self.precision_mode!r}")
        if self.output not in ("csv", "json"):
            raise UsageError(f"output must be csv or json, not {self.output!r}")
        if not (8 <= self.grid_nx <= 512 and 8 <= self.grid_ny <= 512):
            raise UsageError("grid sizes must lie in [8, 512]")
        return self


def parse_config(text):
    """key = value lines; '#' starts a comment; unknown keys are rejected."""
    known = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in known:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(value) if known[key] in (int, "int") else value
        except ValueError:
            raise UsageError(f"config line {lineno}: {key} must be an integer") from None
    return RunConfig(**values)


def load_config(args):
    cfg = RunConfig()
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise MissingInput(f"config file {path} not found")
        cfg = parse_config(path.read_text())
    for key in ("output", "seed", "precision_mode"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if args.cache_dir:
        cfg.cache_dir = args.cache_dir
    # the environment overrides the config file
    if os.environ.get("AQE_CACHE_DIR"):
        cfg.cache_dir = os.environ["AQE_CACHE_DIR"]
    if not cfg.cache_dir:
        cfg.cache_dir = str(Path.home() / ".cache" / "aqe")
    return cfg.validate()


# ------------------------------------------------------------------ output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    if isinstance(v, (complex, np.complexfloating)):
        return f"{complex(v).real:.15g}{complex(v).imag:+.15g}j"
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (complex, np.complexfloating)):
        return [complex(v).real, complex(v).imag]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class Emitter:
    def __init__(self, cfg, out_path=None):
        self.cfg = cfg
        self.out_path = out_path
        self.buf = io.StringIO()

    def line(self, text):
        self.buf.write(text + "\n")

    def table(self, columns, rows):
        if self.cfg.output == "json":
            self.buf.write(json.dumps([dict(zip(columns, _jsonable(list(r)))) for r in rows]) + "\n")
            return
        w = csv.writer(self.buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])

    def flush(self):
        text = self.buf.getvalue()
        if self.out_path:
            Path(self.out_path).write_text(text)
        else:
            sys.stdout.write(text)


# ------------------------------------------------------------------ inputs

def _window(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'a,b', got {text!r}") from None
    if not b > a:
        raise argparse.ArgumentTypeError("window needs a < b")
    return a, b


def _range(text):
    try:
        a, b = (float(v) for v in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be 'a..b', got {text!r}") from None
    return a, b


def _point(text):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"point must be 'x,y', got {text!r}") from None
    if y <= 0:
        raise argparse.ArgumentTypeError("point must lie in the upper half-plane")
    return complex(x, y)


def _cache(cfg):
    path = Path(cfg.cache_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_form(cfg, form_id):
    try:
        return maass.load_form(form_id, _cache(cfg))
    except FileNotFoundError:
        raise MissingInput(f"form {form_id} not in cache {cfg.cache_dir}; run 'aqe solve' first") from None


def _coverage(cfg):
    path = _cache(cfg) / COVERAGE_FILE
    if not path.exists():
        return {"even": [], "odd": []}
    return json.loads(path.read_text())


def _record_coverage(cfg, window, parity):
    cov = _coverage(cfg)
    cov.setdefault(parity, []).append([float(window[0]), float(window[1])])
    cov[parity] = sorted({tuple(w) for w in cov[parity]})
    (_cache(cfg) / COVERAGE_FILE).write_text(json.dumps(cov))


def _catalog(cfg):
    forms = [maass.MaassForm.from_json(p.read_text()) for p in sorted(_cache(cfg).glob("t*.json"))]
    cov = {k: [tuple(w) for w in v] for k, v in _coverage(cfg).items()}
    return maass.Catalog(sorted(forms, key=lambda f: f.t), cov)


def _l_function(cfg, name):
    """zeta | chi_D | form:ID | ad:ID."""
    if name == "zeta":
        return lfun.zeta()
    if name.startswith("chi_"):
        return lfun.dirichlet_l(int(name[4:]))
    if name.startswith("form:"):
        return lfun.from_maass(_load_form(cfg, name[5:]))
    if name.startswith("ad:"):
        return lfun.adjoint(_load_form(cfg, name[3:]))
    raise UsageError(f"unknown L-function {name!r}")


def _verdict(em, name, passed, reason=""):
    if passed:
        em.line(f"PASS {name}")
        return EXIT_PASS
    em.line(f"FAIL {name} reason={reason}")
    return EXIT_FAIL


# ---------------------------------------------------------------- commands

def cmd_solve(args, cfg, em):
    forms = maass.solve_form(args.window, args.parity, args.truncation, args.extend)
    for f in forms:
        maass.save_form(f, _cache(cfg))
    _record_coverage(cfg, args.window, args.parity)
    if not forms:
        em.line("no forms found")
        return EXIT_PASS
    em.table(("form_id", "t", "secular_residual"), [(f.form_id, f.t, f.secular_residual) for f in forms])
    return EXIT_PASS


def check_watson(args, cfg, em):
    form, test = _load_form(cfg, args.form), _load_form(cfg, args.test)
    r = periods.watson_check(form, test, cfg.grid_nx, cfg.grid_ny)
    if r.get("rhs") is None:
        code = _verdict(em, "watson", False, "conductor_too_large")
    else:
        code = _verdict(em, "watson", r["passed"], f"rel_dev={r['relative_deviation']:.3g}")
    em.table(("form", "test_form", "lhs", "rhs", "rel_dev"),
             [(r["form"], r["test_form"], r["lhs"], r.get("rhs"), r.get("relative_deviation"))])
    return code


def check_unfold(args, cfg, em):
    form = _load_form(cfg, args.form)
    r = periods.eisenstein_unfold_check(form, args.t, cfg.grid_nx, cfg.grid_ny)
    code = _verdict(em, "unfold", r["passed"], f"rel_dev={r['relative_deviation']:.3g}")
    em.table(("form", "t", "quadrature", "identity", "rel_dev"),
             [(r["form"], r["t"], r["quadrature"], r["identity"], r["relative_deviation"])])
    return code


def check_spectral(args, cfg, em):
    form = _load_form(cfg, args.form)
    r = periods.spectral_expansion_check(form, GeodesicBall(args.center, args.radius, False),
                                         _catalog(cfg), args.M)
    code = _verdict(em, "spectral", r["passed"], f"residual={r['residual']:.3g}>budget={r['budget']:.3g}")
    em.table(("form", "center", "radius", "M", "direct", "expansion", "residual", "budget"),
             [(r["form"], r["center"], r["radius"], r["M"], r["direct"], r["expansion"],
               r["residual"], r["budget"])])
    return code


def check_stirling(args, cfg, em):
    r = specfun.stirling_check(args.sigma, args.tau)
    if cfg.precision_mode == "extended":
        exact = float(abs(specfun.gamma_r(complex(args.sigma, args.tau), "extended")))
        r.update(exact=exact, rel_dev=abs(exact / r["asymptotic"] - 1.0))
    code = _verdict(em, "stirling", r["rel_dev"] <= args.tol, f"rel_dev={r['rel_dev']:.3g}")
    em.table(("sigma", "tau", "exact", "asymptotic", "rel_dev"),
             [(r["sigma"], r["tau"], r["exact"], r["asymptotic"], r["rel_dev"])])
    return code


def check_gamma_ratio(args, cfg, em):
    if args.imag:
        ex, asym = asai.gamma_ratio_imag(args.tk, args.tphi)
        row = (args.tk, args.tphi, None, ex, asym, abs(ex / asym - 1), asai.omega_imag(args.tk, args.tphi))
    else:
        data = asai.HilbertSpectralData(args.t1, args.t2)
        ex, asym = asai.gamma_ratio_real(args.tk, data)
        row = (args.tk, args.t1, args.t2, ex, asym, abs(ex / asym - 1),
               asai.omega_real(args.tk, args.t1, args.t2))
    code = _verdict(em, "gamma-ratio", row[5] <= args.tol, f"rel_dev={row[5]:.3g}")
    em.table(asai.SWEEP_COLUMNS, [row])
    return code


def check_bh(args, cfg, em):
    a, b = _l_function(cfg, args.left), _l_function(cfg, args.right)
    r = lfun.bh_inequality_check(a, b, args.t)
    em.line(f"{_fmt(r['C_rs_t'])} ≤ {_fmt(r['C_rs_t_bound'])}; {_fmt(r['C_rs'])} ≤ {_fmt(r['C_rs_bound'])}")
    code = _verdict(em, "bh", r["holds"], "inequality_violated")
    em.table(("C_rs_t", "C_rs_t_bound", "C_rs", "C_rs_bound"),
             [(r["C_rs_t"], r["C_rs_t_bound"], r["C_rs"], r["C_rs_bound"])])
    return code


def check_weyl(args, cfg, em):
    cat = _catalog(cfg)
    try:
        r = maass.weyl_count(args.T, cat)
    except AqeError as exc:
        raise MissingInput(str(exc)) from None
    passed = 0.5 <= r["ratio"] <= 2.0
    code = _verdict(em, "weyl", passed, f"ratio={r['ratio']:.3g}")
    em.table(("T", "count", "weyl_main_term", "ratio", "smoothed_count"),
             [(r["T"], r["count"], r["weyl_main_term"], r["ratio"], r["smoothed_count"])])
    return code


def report_discrepancy(args, cfg, em):
    form = _load_form(cfg, args.form)
    r = periods.discrepancy_scan(form, periods.canonical_ball_family(args.height))
    cols = ("center_re", "center_im", "radius", "mass", "reference", "deviation")
    em.table(cols, [tuple(b[c] for c in cols) for b in r["balls"]])
    return EXIT_PASS


def report_zeros(args, cfg, em):
    L = _l_function(cfg, args.l)
    n = lfun.count_zeros(L, args.sigma, args.T)
    if cfg.output == "json":
        em.line(json.dumps({"l": args.l, "sigma": args.sigma, "T": args.T, "count": n}))
    else:
        em.line(str(n))
    return EXIT_PASS


def report_family(args, cfg, em):
    cat = _catalog(cfg)
    if not cat.forms:
        raise MissingInput("no forms in cache")
    policy = {"family": "canonical", "height": args.height, "radii": [0.1, 0.25, 0.5], "grid": [10, 5]}
    balls = periods.canonical_ball_family(args.height)
    records = []
    for f in cat.forms:
        d = periods.discrepancy_scan(f, balls)["discrepancy_lower_bound"]
        records.append(families.FamilyRecord.from_form(f, d))
    families.persist(records, _cache(cfg) / "families.json", policy)
    fam = families.select_family(records, args.Q) if args.Q else records
    sys.stderr.write(f"scan_policy={families.scan_policy_hash(policy)} "
                     f"exceptions={families.exception_count(fam, args.epsilon) if fam else 0}\n")
    em.table(families.REPORT_COLUMNS, families.report_rows(fam, args.epsilon))
    return EXIT_PASS


def report_asai_sweep(args, cfg, em):
    a, b = args.tk
    tks = np.arange(a, b + 0.5 * args.step, args.step)
    if args.imag:
        rows = asai.sweep_imag(args.tphi, tks)
    else:
        rows = asai.sweep_real(asai.HilbertSpectralData(args.t1, args.t2), tks)
    em.table(asai.SWEEP_COLUMNS, rows)
    return EXIT_PASS


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--output", choices=("csv", "json"))
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--precision", dest="precision_mode", choices=("standard", "extended"))

    p = _Parser(prog="aqe", description="Maass forms, L-functions and period identities on SL2(Z)\\H")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve for forms in a spectral window")
    s.add_argument("--window", type=_window, required=True)
    s.add_argument("--parity", choices=("even", "odd"), required=True)
    s.add_argument("--truncation", type=int)
    s.add_argument("--extend", type=int, default=maass.DEFAULT_EXTENSION)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="run a named check")
    cs = c.add_subparsers(dest="check", required=True, parser_class=_Parser)
    w = cs.add_parser("watson", parents=[common])
    w.add_argument("--form", required=True)
    w.add_argument("--test", required=True)
    w.set_defaults(func=check_watson)
    u = cs.add_parser("unfold", parents=[common])
    u.add_argument("--form", required=True)
    u.add_argument("--t", type=float, required=True)
    u.set_defaults(func=check_unfold)
    sp = cs.add_parser("spectral", parents=[common])
    sp.add_argument("--form", required=True)
    sp.add_argument("--center", type=_point, default=2j)
    sp.add_argument("--radius", type=float, default=0.5)
    sp.add_argument("--M", type=float, default=15.0)
    sp.set_defaults(func=check_spectral)
    st = cs.add_parser("stirling", parents=[common])
    st.add_argument("--sigma", type=float, required=True)
    st.add_argument("--tau", type=float, required=True)
    st.add_argument("--tol", type=float, default=0.05)
    st.set_defaults(func=check_stirling)
    g = cs.add_parser("gamma-ratio", parents=[common])
    g.add_argument("--imag", action="store_true")
    g.add_argument("--tk", type=float, required=True)
    g.add_argument("--tphi", type=float, default=0.0)
    g.add_argument("--t1", type=float, default=0.0)
    g.add_argument("--t2", type=float, default=0.0)
    g.add_argument("--tol", type=float, default=0.15)
    g.set_defaults(func=check_gamma_ratio)
    b = cs.add_parser("bh", parents=[common])
    b.add_argument("--left", required=True)
    b.add_argument("--right", required=True)
    b.add_argument("--t", type=float, default=0.0)
    b.set_defaults(func=check_bh)
    wy = cs.add_parser("weyl", parents=[common])
    wy.add_argument("--T", type=float, required=True)
    wy.set_defaults(func=check_weyl)

    r = sub.add_parser("report", help="write a report")
    rs = r.add_subparsers(dest="report", required=True, parser_class=_Parser)
    d = rs.add_parser("discrepancy", parents=[common])
    d.add_argument("--form", required=True)
    d.add_argument("--height", type=float, default=2.0)
    d.set_defaults(func=report_discrepancy)
    z = rs.add_parser("zeros", parents=[common])
    z.add_argument("--l", default="zeta")
    z.add_argument("--sigma", type=float, required=True)
    z.add_argument("--T", type=float, required=True)
    z.set_defaults(func=report_zeros)
    f = rs.add_parser("family", parents=[common])
    f.add_argument("--Q", type=float)
    f.add_argument("--epsilon", type=float, default=1.0)
    f.add_argument("--height", type=float, default=2.0)
    f.set_defaults(func=report_family)
    a = rs.add_parser("asai-sweep", parents=[common])
    a.add_argument("--imag", action="store_true")
    a.add_argument("--tphi", type=float, default=0.0)
    a.add_argument("--t1", type=float, default=0.0)
    a.add_argument("--t2", type=float, default=0.0)
    a.add_argument("--tk", type=_range, default=(0.0, 40.0))
    a.add_argument("--step", type=float, default=1.0)
    a.set_defaults(func=report_asai_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except MissingInput as exc:
        sys.stderr.write(f"missing input: {exc}\n")
        return EXIT_MISSING
    em = Emitter(cfg, args.out)
    try:
        code = args.func(args, cfg, em)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except MissingInput as exc:
        em.flush()
        sys.stderr.write(f"missing input: {exc}\n")
        return EXIT_MISSING
    except AqeError as exc:
        em.line(f"FAIL {args.command} reason={type(exc).__name__}: {exc}")
        em.flush()
        return EXIT_FAIL
    em.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
