"""Command-line surface: theory tables, sampling, arm experiments, reports.

Subcommands: theory, sample, arms, loops, qmult, report.  A flat
``key = value`` config file can prefill any experiment flag; explicit
flags win.  Exit codes: 0 ok, 2 configuration error, 3 runtime assertion
(planarity or branch-rule failure).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import coloring as coloring_mod
from . import estimation, exponents, fk, geometry, loops as loops_mod
from .arms import HALFPLANE_MODE, PLANE_MODE, PlanarityError


class ConfigError(ValueError):
    pass


def _parse_ladder(text):
    out = []
    for part in text.split(","):
        m, n = part.split(":")
        out.append((int(m), int(n)))
    return out


def _parse_triples(text):
    out = []
    for part in text.split(","):
        l, m, n = part.split(":")
        out.append((int(l), int(m), int(n)))
    return out


def _load_config_file(path):
    values = {}
    with open(path) as fh:
        for ln in fh:
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise ConfigError(f"bad config line: {ln!r}")
            k, v = (s.strip() for s in ln.split("=", 1))
            values[k.replace("-", "_")] = v
    return values


_CONFIG_PARSERS = {
    "q": float, "r": float, "family": str, "tau": str, "setting": str,
    "padding": int, "chains": int, "samples_per_chain": int, "burn_in": int,
    "thin": int, "seed": int, "ladder": _parse_ladder,
    "triples": _parse_triples, "out": str, "threads": int,
}


def _apply_config(ns, path):
    for key, raw in _load_config_file(path).items():
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(ns, key, None) is None:
            try:
                setattr(ns, key, _CONFIG_PARSERS[key](raw))
            except Exception as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def _out_stream(ns):
    if ns.out:
        return open(ns.out, "w")
    return sys.stdout


def _run_config(ns, need=("q", "r", "family", "tau", "ladder")):
    missing = [k for k in need if getattr(ns, k, None) is None]
    if missing:
        raise ConfigError(f"missing required settings: {', '.join(missing)}")
    try:
        return estimation.RunConfig(
            q=ns.q, r=ns.r, family=ns.family, tau=ns.tau,
            ladder=ns.ladder if "ladder" in need else [(1, 2)],
            setting=ns.setting or PLANE_MODE,
            padding=ns.padding if ns.padding is not None else 2,
            chains=ns.chains if ns.chains is not None else 1,
            samples_per_chain=(ns.samples_per_chain
                               if ns.samples_per_chain is not None else 1000),
            burn_in=ns.burn_in if ns.burn_in is not None else 200,
            thin=ns.thin if ns.thin is not None else 2,
            seed=ns.seed if ns.seed is not None else 0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# -- subcommands --------------------------------------------------------------

def _cmd_theory(ns):
    if ns.q is None or ns.r is None or ns.tau is None:
        raise ConfigError("theory needs --q, --r and --tau")
    try:
        params = exponents.ModelParams(ns.q, ns.r)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    settings = ([ns.setting] if ns.setting
                else [PLANE_MODE, HALFPLANE_MODE])
    out = _out_stream(ns)
    out.write("q,r,tau,setting,I,Iplus,exponent\n")
    from .arms import interface_count
    for tau in ns.tau.split(","):
        cyclic, linear_plus = interface_count(tau)
        for setting in settings:
            alpha = exponents.exponent_for(tau, setting, params)
            val = "" if alpha is None else f"{alpha:.12g}"
            out.write(f"{ns.q},{ns.r},{tau},{setting},{cyclic},"
                      f"{linear_plus},{val}\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _region_from_flags(ns):
    if ns.box is not None:
        return geometry.build_box(ns.box)
    if ns.half_box is not None:
        return geometry.build_half_box(ns.half_box)
    if ns.annulus is not None:
        m, n = (int(v) for v in ns.annulus.split(":"))
        return geometry.build_annulus(m, n)
    if ns.half_annulus is not None:
        m, n = (int(v) for v in ns.half_annulus.split(":"))
        return geometry.build_half_annulus(m, n)
    raise ConfigError("give one of --box/--half-box/--annulus/--half-annulus")


def _cmd_sample(ns):
    region = _region_from_flags(ns)
    if ns.q is None:
        raise ConfigError("sample needs --q")
    bc = ns.bc or fk.FREE
    if bc not in (fk.FREE, fk.WIRED):
        raise ConfigError(f"unknown boundary condition {bc!r}")
    out = _out_stream(ns)
    out.write(geometry.dump_region(region))
    count = ns.count if ns.count is not None else 1
    for cfg in fk.iter_samples(region, ns.q, bc,
                               burn_in=ns.burn_in if ns.burn_in is not None
                               else 200,
                               thin=ns.thin if ns.thin is not None else 1,
                               count=count,
                               seed=ns.seed if ns.seed is not None else 0):
        out.write(cfg.dump())
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_arms(ns):
    cfg = _run_config(ns)
    events_out = open(ns.events_out, "w") if ns.events_out else None
    try:
        table = estimation.run_experiment(cfg, threads=ns.threads or 1,
                                          events_out=events_out)
    finally:
        if events_out:
            events_out.close()
    out = _out_stream(ns)
    out.write(table.to_csv())
    fit = estimation.fit_exponent(table)
    if fit is not None:
        out.write(f"# fit slope={fit.slope:.6g} stderr={fit.stderr:.3g} "
                  f"rungs={fit.n_used}\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_loops(ns):
    if ns.box is None or ns.q is None:
        raise ConfigError("loops needs --box and --q")
    region = geometry.build_box(ns.box)
    seed = ns.seed if ns.seed is not None else 0
    cfgs = fk.sample(region, ns.q, fk.FREE,
                     burn_in=ns.burn_in if ns.burn_in is not None else 200,
                     thin=ns.thin if ns.thin is not None else 1,
                     count=ns.count if ns.count is not None else 1, seed=seed)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    mode = ns.mode or "bond"
    out = _out_stream(ns)
    for cfg in cfgs:
        if mode == "bond":
            ls = loops_mod.encode_bond_loops(region, cfg)
        else:
            clusters = fk.label_clusters(cfg, fk.FREE)
            r = ns.r if ns.r is not None else 0.5
            col = coloring_mod.color_clusters(clusters, r, rng=rng)
            sign = "+" if mode == "plus" else "-"
            ls = loops_mod.encode_color_loops(region, col, sign)
        out.write(loops_mod.dump_loops(ls))
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_qmult(ns):
    if ns.triples is None:
        raise ConfigError("qmult needs --triples l:m:n[,l:m:n...]")
    ns.ladder = [(1, 2)]  # placeholder; replaced by the rung set
    cfg = _run_config(ns, need=("q", "r", "family", "tau"))
    rows, table = estimation.quasi_mult_report(cfg, ns.triples,
                                               threads=ns.threads or 1)
    out = _out_stream(ns)
    out.write("l,m,n,ratio,lo,hi,flagged\n")
    for r in rows:
        out.write(f"{r.ell},{r.m},{r.n},{r.ratio:.6g},{r.lo:.6g},"
                  f"{r.hi:.6g},{int(r.flagged)}\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_report(ns):
    if ns.table is None or ns.q is None or ns.r is None or ns.tau is None:
        raise ConfigError("report needs --table, --q, --r and --tau")
    with open(ns.table) as fh:
        table = estimation.load_table(fh.read())
    setting = ns.setting or table.metadata.get("setting", PLANE_MODE)
    fit = estimation.fit_exponent(table)
    try:
        params = exponents.ModelParams(ns.q, ns.r)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    flags = [] if fit is not None else ["fit-undefined"]
    doc = estimation.report_json(None, table, {(ns.tau, setting): fit},
                                 params, flags)
    out = _out_stream(ns)
    out.write(doc + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


# -- parser -------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fuzzy-potts",
        description="critical fuzzy Potts model laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="closed-form exponent table")
    _add_common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--tau", help="comma-separated color sequences")
    p.add_argument("--setting", choices=[PLANE_MODE, HALFPLANE_MODE])
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("sample", help="sample FK configurations")
    _add_common(p)
    p.add_argument("--box", type=int)
    p.add_argument("--half-box", dest="half_box", type=int)
    p.add_argument("--annulus")
    p.add_argument("--half-annulus", dest="half_annulus")
    p.add_argument("--q", type=float)
    p.add_argument("--bc", choices=[fk.FREE, fk.WIRED])
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thin", type=int)
    p.add_argument("--count", type=int)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("arms", help="arm-event frequency experiment")
    _add_common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--family", choices=list(estimation.FAMILIES))
    p.add_argument("--tau")
    p.add_argument("--ladder", type=_parse_ladder, help="m:n[,m:n...]")
    p.add_argument("--setting", choices=[PLANE_MODE, HALFPLANE_MODE])
    p.add_argument("--padding", type=int)
    p.add_argument("--chains", type=int)
    p.add_argument("--samples-per-chain", dest="samples_per_chain", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thin", type=int)
    p.add_argument("--events-out", dest="events_out")
    p.set_defaults(func=_cmd_arms)

    p = sub.add_parser("loops", help="export loop encodings of samples")
    _add_common(p)
    p.add_argument("--box", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--mode", choices=["bond", "plus", "minus"])
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thin", type=int)
    p.add_argument("--count", type=int)
    p.set_defaults(func=_cmd_loops)

    p = sub.add_parser("qmult", help="quasi-multiplicativity ratios")
    _add_common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--family", choices=list(estimation.FAMILIES))
    p.add_argument("--tau")
    p.add_argument("--triples", type=_parse_triples, help="l:m:n[,l:m:n...]")
    p.add_argument("--setting", choices=[PLANE_MODE, HALFPLANE_MODE])
    p.add_argument("--padding", type=int)
    p.add_argument("--chains", type=int)
    p.add_argument("--samples-per-chain", dest="samples_per_chain", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thin", type=int)
    p.set_defaults(func=_cmd_qmult)

    p = sub.add_parser("report", help="compare a table against theory")
    _add_common(p)
    p.add_argument("--table", help="estimate table CSV")
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--tau")
    p.add_argument("--setting", choices=[PLANE_MODE, HALFPLANE_MODE])
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.config:
            _apply_config(ns, ns.config)
        return ns.func(ns)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PlanarityError, exponents.BranchError, AssertionError) as exc:
        print(f"runtime assertion: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
