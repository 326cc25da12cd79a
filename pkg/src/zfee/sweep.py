"""Sweep driver and deterministic CSV formatting.

Every sweep point is an independent computation, so points can be farmed
out to a process pool; rows always come back in axis order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

from .core import DomainError, linear_to_db, normalize
from .ideal_csi import csi_optimum
from .optimizer import optimize_fixed_k, optimize_fixed_mk, optimize_integer
from .regime import check_conditions, nonmassive_ee_bracket
from .scenario import Scenario


class CapHitError(RuntimeError):
    """An optimum landed on an artificial search bound."""


SWEEP_COLUMNS = (
    "x", "Gc_dB", "R", "p_r_W", "rho_r", "regime",
    "nonmassive_lhs", "nonmassive_rhs", "k_max", "fixed_power_ratio",
    "antenna_floor_rhs", "rate_headroom_rhs", "multiuser_rhs", "r_max",
    "free_M", "free_K", "free_tau", "free_eta",
    "capped_M", "capped_K", "capped_tau", "capped_eta",
    "fixed_mk_M", "fixed_mk_K", "fixed_mk_tau", "fixed_mk_eta",
    "fixed_k_M", "fixed_k_K", "fixed_k_tau", "fixed_k_eta", "fixed_k_ratio",
    "csi_M", "csi_K", "csi_eta",
    "bracket_lower", "bracket_upper",
)


def fmt(value) -> str:
    """Locale-free text: 17 significant digits for floats, blank for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(getattr(value, "value", value))


def write_csv(rows: Iterable[dict], columns: Sequence[str], out=None) -> str:
    """Render rows; write to ``out`` if given and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def _check_caps(opt, label, x):
    if opt.cap_hit:
        raise CapHitError(f"{label} optimum hit a search cap at sweep point {fmt(x)}")


def sweep_point(scenario: Scenario, x: float) -> dict:
    """All sweep columns at one axis value."""
    p, R = scenario.at(x)
    th = normalize(p)
    rep = check_conditions(R, th)
    row = {
        "x": float(x), "Gc_dB": float(linear_to_db(p.Gc)), "R": R, "p_r_W": p.p_r,
        "rho_r": th.rho_r, "regime": rep.classification,
        "nonmassive_lhs": rep.nonmassive.lhs, "nonmassive_rhs": rep.nonmassive.rhs,
        "k_max": rep.k_max, "fixed_power_ratio": rep.fixed_power.lhs,
        "antenna_floor_rhs": rep.antenna_floor.rhs, "rate_headroom_rhs": rep.rate_headroom.rhs,
        "multiuser_rhs": rep.multiuser.rhs, "r_max": rep.r_max,
    }
    free = optimize_integer(R, th, physical=p)
    _check_caps(free, "free", x)
    row.update(free_M=free.design.M, free_K=free.design.K, free_tau=free.design.tau,
               free_eta=free.eta)
    capped = None
    if math.floor(rep.k_max) >= 1:
        capped = optimize_integer(R, th, capped_k=True, physical=p)
        _check_caps(capped, "capped", x)
        row.update(capped_M=capped.design.M, capped_K=capped.design.K,
                   capped_tau=capped.design.tau, capped_eta=capped.eta)
    M, K = scenario.fixed_mk
    try:
        fmk = optimize_fixed_mk(M, K, R, th, physical=p)
        row.update(fixed_mk_M=M, fixed_mk_K=K, fixed_mk_tau=fmk.design.tau, fixed_mk_eta=fmk.eta)
    except DomainError:
        pass
    if scenario.fixed_k is not None:
        fk = optimize_fixed_k(scenario.fixed_k, R, th, physical=p)
        _check_caps(fk, "fixed-K", x)
        ref = capped if scenario.capped_k and capped is not None else free
        row.update(fixed_k_M=fk.design.M, fixed_k_K=fk.design.K, fixed_k_tau=fk.design.tau,
                   fixed_k_eta=fk.eta, fixed_k_ratio=ref.eta / fk.eta)
    csi = csi_optimum(R, th, check=False)
    row.update(csi_M=csi.m_opt, csi_K=csi.k_opt, csi_eta=p.Gc * csi.zeta_csi / p.N0)
    br = nonmassive_ee_bracket(R, p)
    row.update(bracket_lower=br.lower, bracket_upper=br.upper)
    return row


def _point(args):
    return sweep_point(*args)


def run_sweep(scenario: Scenario, jobs: int = 1) -> list[dict]:
    """Rows for every sweep point, in axis order."""
    if scenario.sweep is None:
        raise DomainError("scenario defines no sweep")
    if scenario.R is None:
        raise DomainError("scenario defines no rate R")
    xs = [float(v) for v in scenario.sweep.values()]
    tasks = [(scenario, x) for x in xs]
    if jobs <= 1:
        return [_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_point, tasks))
