"""Command-line interface.

Exit codes: 0 success, 2 bad arguments or scenario, 3 domain error,
4 search cap hit, 5 Monte-Carlo validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import __version__
from .core import DesignPoint, DomainError, evaluate_ee, linear_to_db, normalize, required_gamma_u
from .montecarlo import SimConfig, simulate
from .optimizer import (
    SearchCaps, optimize_fixed_k, optimize_fixed_mk, optimize_integer, optimize_relaxed,
)
from .regime import check_conditions
from .roots import BracketError
from .scenario import PRESETS, ScenarioError, load_scenario, preset
from .sweep import SWEEP_COLUMNS, CapHitError, run_sweep, write_csv

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CAP, EXIT_VALIDATION = 0, 2, 3, 4, 5

EVAL_COLUMNS = ("M", "K", "tau", "R", "Gc_dB", "gamma_u", "p_u_W", "P_total_W",
                "eta_bits_per_J", "zeta", "pa_W", "bs_rf_W", "mud_W", "circuit_W", "fixed_W")
OPTIMIZE_COLUMNS = ("mode", "M", "K", "tau", "R", "Gc_dB", "zeta", "eta_bits_per_J",
                    "cap_hit_m", "cap_hit_k", "converged", "evaluations")
CLASSIFY_COLUMNS = (
    "R", "Gc_dB", "classification", "nonmassive_lhs", "nonmassive_rhs", "nonmassive_ok",
    "k_max", "user_cap_ok", "fixed_power_ratio", "fixed_power_ok", "rho_r",
    "antenna_floor_rhs", "antenna_floor_ok", "rate_headroom_rhs", "rate_headroom_ok",
    "multiuser_rhs", "multiuser_ok", "c_theta", "r_max", "rate_headroom_via_rmax", "mud_bounded",
)
MC_COLUMNS = ("M", "K", "tau", "T", "R", "gamma_u", "replicates", "seed", "empirical_rate",
              "stderr", "analytical_bound", "estimate_var", "estimate_var_expected",
              "estimate_var_stderr", "channel_mse", "redraws", "verdict")


class UsageError(ValueError):
    pass


def _ints(text, n, what):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{what} must be {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what} must be {n} comma-separated integers, got {text!r}")
    return vals


def _overrides(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _scenario(args):
    ov = _overrides(args.set)
    if args.R is not None:
        ov["R"] = repr(args.R)
    if args.scenario and args.preset:
        raise UsageError("give --scenario or --preset, not both")
    if args.scenario:
        return load_scenario(args.scenario, ov)
    return preset(args.preset or "gain", ov)


def _rate(sc):
    if sc.R is None:
        raise UsageError("no rate: set R in the scenario or pass --R")
    return sc.R


def _emit(args, rows, columns):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, columns, fh)
    else:
        write_csv(rows, columns, sys.stdout)


def cmd_eval(args):
    sc = _scenario(args)
    p, R = sc.physical, _rate(sc)
    if not args.design:
        raise UsageError("eval needs --design M,K,tau")
    d = DesignPoint(*_ints(args.design, 3, "--design"))
    res = evaluate_ee(d, R, physical=p)
    w = res.breakdown_w
    row = dict(M=d.M, K=d.K, tau=d.tau, R=R, Gc_dB=float(linear_to_db(p.Gc)),
               gamma_u=res.gamma_u, p_u_W=res.p_u, P_total_W=res.P_total,
               eta_bits_per_J=res.eta, zeta=res.zeta, pa_W=w.pa, bs_rf_W=w.bs_rf,
               mud_W=w.mud, circuit_W=w.circuit, fixed_W=w.fixed)
    _emit(args, [row], EVAL_COLUMNS)
    return EXIT_OK


def cmd_optimize(args):
    sc = _scenario(args)
    p, R = sc.physical, _rate(sc)
    th = normalize(p)
    caps = SearchCaps(m_cap=args.m_cap)
    capped = args.capped_k or sc.capped_k
    rows, status = [], EXIT_OK
    if args.fixed_mk:
        M, K = _ints(args.fixed_mk, 2, "--fixed-mk")
        opt, mode = optimize_fixed_mk(M, K, R, th, physical=p), "fixed_mk"
    elif args.fixed_k is not None:
        # a scenario's fixed_k only adds the sweep comparison curve
        opt, mode = optimize_fixed_k(args.fixed_k, R, th, caps, physical=p), "fixed_k"
    else:
        opt = optimize_integer(R, th, caps, capped_k=capped, physical=p)
        mode = "capped" if capped else "free"
    for o, m in [(opt, mode)] + ([(optimize_relaxed(R, th, start=opt if capped else None,
                                                    physical=p), "relaxed")]
                                  if args.relaxed else []):
        M, K, tau = o.design
        rows.append(dict(mode=m, M=M, K=K, tau=tau, R=R, Gc_dB=float(linear_to_db(p.Gc)),
                         zeta=o.zeta, eta_bits_per_J=o.eta, cap_hit_m=o.cap_hit.m,
                         cap_hit_k=o.cap_hit.k, converged=o.converged,
                         evaluations=o.evaluations))
        if o.cap_hit:
            status = EXIT_CAP
    _emit(args, rows, OPTIMIZE_COLUMNS)
    if status == EXIT_CAP:
        print("error: optimum touches a search cap; raise --m-cap", file=sys.stderr)
    return status


def _describe(rep):
    def mark(c):
        return "holds" if c.satisfied else "fails"
    nm = rep.nonmassive
    lines = [
        f"classification: {rep.classification}",
        f"  single user   rho_r + 2 rho_0 = {nm.lhs:.6g} >= {nm.rhs:.6g}: {mark(nm)}",
        f"  user cap      K_max = {rep.k_max:.6g} > 10: {mark(rep.user_cap)}",
        f"  fixed power   rho_s/alpha = {rep.fixed_power.lhs:.6g} > 1/2: {mark(rep.fixed_power)}",
    ]
    for label, name, op in (("antenna floor", "antenna_floor", ">"),
                            ("rate headroom", "rate_headroom", ">"),
                            ("multiuser    ", "multiuser", "<")):
        c = getattr(rep, name)
        lines.append(f"  {label} rho_r = {c.lhs:.6g} {op} {c.rhs:.6g}: {mark(c)}")
    lines.append(f"  c = {rep.c_theta:.6g}, R_max = {rep.r_max:.6g}")
    return "\n".join(lines)


def cmd_classify(args):
    sc = _scenario(args)
    p, R = sc.physical, _rate(sc)
    th = normalize(p)
    rep = check_conditions(R, th)
    print(_describe(rep), file=sys.stderr)
    row = dict(R=R, Gc_dB=float(linear_to_db(p.Gc)), classification=rep.classification,
               nonmassive_lhs=rep.nonmassive.lhs, nonmassive_rhs=rep.nonmassive.rhs,
               nonmassive_ok=rep.nonmassive.satisfied, k_max=rep.k_max,
               user_cap_ok=rep.user_cap.satisfied, fixed_power_ratio=rep.fixed_power.lhs,
               fixed_power_ok=rep.fixed_power.satisfied, rho_r=th.rho_r,
               c_theta=rep.c_theta, r_max=rep.r_max,
               rate_headroom_via_rmax=rep.rate_headroom_via_rmax, mud_bounded=rep.mud_bounded)
    for name in ("antenna_floor", "rate_headroom", "multiuser"):
        cond = getattr(rep, name)
        row[f"{name}_rhs"], row[f"{name}_ok"] = cond.rhs, cond.satisfied
    _emit(args, [row], CLASSIFY_COLUMNS)
    return EXIT_OK


def cmd_sweep(args):
    sc = _scenario(args)
    if args.fixed_k is not None or args.fixed_mk or args.capped_k:
        changes = {}
        if args.fixed_k is not None:
            changes["fixed_k"] = args.fixed_k
        if args.fixed_mk:
            changes["fixed_mk"] = _ints(args.fixed_mk, 2, "--fixed-mk")
        if args.capped_k:
            changes["capped_k"] = True
        sc = dataclasses.replace(sc, **changes)
    rows = run_sweep(sc, jobs=args.jobs)
    _emit(args, rows, SWEEP_COLUMNS)
    return EXIT_OK


def cmd_mc_validate(args):
    sc = _scenario(args)
    R = _rate(sc)
    T = sc.physical.T
    if not args.design:
        raise UsageError("mc-validate needs --design M,K,tau")
    M, K, tau = DesignPoint(*_ints(args.design, 3, "--design")).check(T)
    g = required_gamma_u(M, K, tau, R, T)
    out = simulate(SimConfig(M, K, tau, g, T, args.replicates, args.seed))
    holds = out.lower_bound_holds
    verdict = "untested" if holds is None else ("pass" if holds else "fail")
    row = dict(M=M, K=K, tau=tau, T=T, R=R, gamma_u=g, replicates=out.replicates,
               seed=args.seed, empirical_rate=out.empirical_rate, stderr=out.stderr,
               analytical_bound=out.analytical_bound, estimate_var=out.estimate_var,
               estimate_var_expected=tau * g / (1 + tau * g),
               estimate_var_stderr=out.estimate_var_stderr, channel_mse=out.channel_mse,
               redraws=out.redraws, verdict=verdict)
    _emit(args, [row], MC_COLUMNS)
    return EXIT_VALIDATION if holds is False else EXIT_OK


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("scenario")
    src.add_argument("--scenario", metavar="PATH", help="key=value scenario file")
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario (default gain)")
    src.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a scenario key, e.g. Gc_dB=-90 (repeatable)")
    src.add_argument("--R", type=float, help="sum spectral efficiency, bits/s/Hz")
    common.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")

    ap = argparse.ArgumentParser(prog="zfee", description="Energy efficiency of ZF uplink MU-MIMO.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one design point")
    p.add_argument("--design", metavar="M,K,TAU")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("optimize", parents=[common], help="optimal design")
    p.add_argument("--capped-k", action="store_true", help="limit K to floor(K_max)")
    p.add_argument("--fixed-mk", metavar="M,K", help="optimize only the pilot length")
    p.add_argument("--fixed-k", type=int, metavar="K", help="optimize M and tau at fixed K")
    p.add_argument("--relaxed", action="store_true", help="also solve the real-valued problem")
    p.add_argument("--m-cap", type=int, default=SearchCaps.m_cap, help="antenna search bound")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("classify", parents=[common], help="regime conditions")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", parents=[common], help="sweep the scenario axis")
    p.add_argument("--capped-k", action="store_true")
    p.add_argument("--fixed-mk", metavar="M,K")
    p.add_argument("--fixed-k", type=int, metavar="K")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mc-validate", parents=[common], help="Monte-Carlo check of the rate bound")
    p.add_argument("--design", metavar="M,K,TAU")
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--seed", type=_u64, default=0)
    p.set_defaults(func=cmd_mc_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except CapHitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
