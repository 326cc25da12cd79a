"""Flat ``key = value`` scenario files and the built-in presets.

One assignment per line, ``#`` starts a comment. Recognized keys:

==================  ========================================================
``N0`` / ``N0_dB``  noise PSD in W/Hz, or dBW/Hz
``B``, ``Tc``       bandwidth (Hz), coherence time (s)
``Gc`` / ``Gc_dB``  channel gain, linear or ``10 log10``
``alpha``           PA inefficiency
``p_r p_d p_s``     antenna, per-user and fixed power (W)
``C0``              energy per complex operation (J)
``beta delta mu``   optional: derive ``p_d = beta p_r``, ``p_s = delta p_r``,
                    ``C0 = mu p_r / B`` so a ``p_r`` sweep keeps the ratios
``R``               sum spectral efficiency (bits/s/Hz)
``sweep.*``         ``variable`` (Gc, p_r or R), ``start``, ``stop``,
                    ``points``, ``spacing`` (log or linear)
``capped_k``        true/false: limit the user count to ``K_max``
``fixed_mk``        ``M,K`` for the fixed-array curve (default ``2,1``)
``fixed_k``         user count for the fixed-K curve
==================  ========================================================

Gc sweep bounds are always given in dB; ``log`` spacing is uniform in dB.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DomainError, PhysicalParams, db_to_linear


class ScenarioError(ValueError):
    """Malformed scenario text; the message names the line and key."""


_FLOAT_KEYS = {"N0", "N0_dB", "B", "Tc", "Gc", "Gc_dB", "alpha", "p_r", "p_d", "p_s",
               "C0", "beta", "delta", "mu", "R", "sweep.start", "sweep.stop"}
_OTHER_KEYS = {"sweep.variable", "sweep.points", "sweep.spacing", "capped_k",
               "fixed_mk", "fixed_k"}
KEYS = frozenset(_FLOAT_KEYS | _OTHER_KEYS)
SWEEP_VARIABLES = ("Gc", "p_r", "R")


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    points: int
    spacing: str = "log"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ScenarioError(f"sweep.variable must be one of {', '.join(SWEEP_VARIABLES)}")
        if self.points < 2:
            raise ScenarioError("sweep.points must be at least 2")
        if self.spacing not in ("log", "linear"):
            raise ScenarioError("sweep.spacing must be log or linear")
        if self.start == self.stop:
            raise ScenarioError("sweep.start and sweep.stop must differ")
        if self.variable != "Gc" and self.spacing == "log" and min(self.start, self.stop) <= 0:
            raise ScenarioError("log spacing needs positive bounds")

    def values(self) -> np.ndarray:
        """Sweep axis in declaration order (Gc in dB)."""
        if self.variable == "Gc":
            if self.spacing == "log":
                return np.linspace(self.start, self.stop, self.points)
            lin = np.linspace(db_to_linear(self.start), db_to_linear(self.stop), self.points)
            return 10.0 * np.log10(lin)
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario: base parameters plus optional sweep and mode flags."""

    physical: PhysicalParams
    R: Optional[float] = None
    sweep: Optional[Sweep] = None
    capped_k: bool = False
    fixed_mk: tuple = (2, 1)
    fixed_k: Optional[int] = None
    ratios: Optional[tuple] = None   # (beta, delta, mu)

    def at(self, value: float) -> tuple[PhysicalParams, float]:
        """Physical parameters and rate at one sweep coordinate."""
        if self.sweep is None:
            raise ScenarioError("scenario has no sweep")
        p, R = self.physical, self.R
        var = self.sweep.variable
        if var == "Gc":
            p = p.replace(Gc=float(db_to_linear(value)))
        elif var == "p_r":
            p = _with_ratios(p, float(value), self.ratios)
        else:
            R = float(value)
        return p, R


def _with_ratios(p, p_r, ratios):
    if ratios is None:
        return p.replace(p_r=p_r)
    beta, delta, mu = ratios
    return p.replace(p_r=p_r, p_d=beta * p_r, p_s=delta * p_r, C0=mu * p_r / p.B)


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _pair(text):
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected M,K, got {text!r}")
    return tuple(parts)


def read_pairs(text: str, source: str = "<scenario>") -> dict:
    """``{key: (value_text, line_number)}`` with unknown keys and duplicates rejected."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{source}:{n}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ScenarioError(f"{source}:{n}: unknown key {key!r}")
        if key in out:
            raise ScenarioError(f"{source}:{n}: duplicate key {key!r}")
        if not value:
            raise ScenarioError(f"{source}:{n}: empty value for {key!r}")
        out[key] = (value, n)
    return out


def parse_scenario(text: str, source: str = "<scenario>",
                   overrides: Optional[dict] = None) -> Scenario:
    """Parse scenario text; ``overrides`` maps keys to value strings applied on top.

    Raises
    ------
    ScenarioError
        On syntax errors, unknown or missing keys, or values that fail
        the parameter invariants.
    """
    pairs = read_pairs(text, source)
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ScenarioError(f"override: unknown key {key!r}")
        pairs[key] = (value, 0)
    # a linear/dB override replaces the other spelling
    for lin, db in (("Gc", "Gc_dB"), ("N0", "N0_dB")):
        if overrides and lin in overrides:
            pairs.pop(db, None)
        if overrides and db in overrides:
            pairs.pop(lin, None)

    def where(key):
        n = pairs[key][1]
        return f"{source}:{n}" if n else "override"

    vals = {}
    for key, (value, _) in pairs.items():
        try:
            if key in _FLOAT_KEYS:
                v = float(value)
                if not math.isfinite(v):
                    raise ValueError("not finite")
            elif key == "sweep.points" or key == "fixed_k":
                v = int(value)
            elif key == "capped_k":
                v = _bool(value)
            elif key == "fixed_mk":
                v = _pair(value)
            else:
                v = value
        except ValueError as exc:
            raise ScenarioError(f"{where(key)}: bad value for {key!r}: {exc}") from None
        vals[key] = v

    for lin, db in (("Gc", "Gc_dB"), ("N0", "N0_dB")):
        if lin in vals and db in vals:
            raise ScenarioError(f"{where(db)}: give only one of {lin!r} and {db!r}")
        if db in vals:
            vals[lin] = float(db_to_linear(vals.pop(db)))

    ratio_keys = ("beta", "delta", "mu")
    given = [k for k in ratio_keys if k in vals]
    ratios = None
    if given:
        if len(given) != 3:
            raise ScenarioError(f"ratio mode needs all of beta, delta, mu; got {', '.join(given)}")
        for k in ("p_d", "p_s", "C0"):
            if k in vals:
                raise ScenarioError(f"{where(k)}: {k!r} conflicts with ratio mode")
        ratios = tuple(vals.pop(k) for k in ratio_keys)
        if "p_r" in vals and "B" in vals:
            beta, delta, mu = ratios
            vals["p_d"] = beta * vals["p_r"]
            vals["p_s"] = delta * vals["p_r"]
            vals["C0"] = mu * vals["p_r"] / vals["B"]

    fields = [f.name for f in dataclasses.fields(PhysicalParams)]
    missing = [k for k in fields if k not in vals]
    if missing:
        raise ScenarioError(f"{source}: missing key(s) {', '.join(missing)}")
    try:
        physical = PhysicalParams(**{k: vals[k] for k in fields})
    except DomainError as exc:
        raise ScenarioError(f"{source}: {exc}") from None

    sweep = None
    skeys = [k for k in vals if k.startswith("sweep.")]
    if skeys:
        need = ("sweep.variable", "sweep.start", "sweep.stop", "sweep.points")
        absent = [k for k in need if k not in vals]
        if absent:
            raise ScenarioError(f"{source}: missing key(s) {', '.join(absent)}")
        sweep = Sweep(vals["sweep.variable"], vals["sweep.start"], vals["sweep.stop"],
                      vals["sweep.points"], vals.get("sweep.spacing", "log"))

    R = vals.get("R")
    if R is not None and R <= 0:
        raise ScenarioError(f"{where('R')}: R must be positive")
    fixed_k = vals.get("fixed_k")
    if fixed_k is not None and fixed_k < 1:
        raise ScenarioError(f"{where('fixed_k')}: fixed_k must be positive")
    fixed_mk = vals.get("fixed_mk", (2, 1))
    if fixed_mk[1] < 1 or fixed_mk[0] < fixed_mk[1] + 1:
        raise ScenarioError("fixed_mk needs K >= 1 and M >= K + 1")
    return Scenario(physical=physical, R=R, sweep=sweep, capped_k=vals.get("capped_k", False),
                    fixed_mk=fixed_mk, fixed_k=fixed_k, ratios=ratios)


def load_scenario(path: str, overrides: Optional[dict] = None) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), source=path, overrides=overrides)


_COMMON = """\
N0_dB = -204
B = 2e5
Tc = 2e-3
alpha = 2
"""

PRESETS = {
    "gain": _COMMON + """\
# EE versus channel gain
Gc_dB = -100
R = 8
p_r = 0.01
p_d = 0.01
p_s = 0.1
C0 = 1e-9
sweep.variable = Gc
sweep.start = -80
sweep.stop = -141
sweep.points = 62
sweep.spacing = log
""",
    "antenna-power": _COMMON + """\
# EE versus antenna power at fixed power ratios
Gc_dB = -100
R = 8
p_r = 0.01
beta = 1
delta = 10
mu = 0.02
sweep.variable = p_r
sweep.start = 1e-7
sweep.stop = 1e-1
sweep.points = 61
sweep.spacing = log
""",
    "high-rate": _COMMON + """\
# high-rate regime, user count pinned near its cap
Gc_dB = -70
R = 50
p_r = 0.01
p_d = 0.01
p_s = 0.01
C0 = 1e-9
capped_k = true
fixed_k = 16
sweep.variable = Gc
sweep.start = -60
sweep.stop = -100
sweep.points = 41
sweep.spacing = log
""",
}


def preset(name: str, overrides: Optional[dict] = None) -> Scenario:
    try:
        text = PRESETS[name]
    except KeyError:
        raise ScenarioError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return parse_scenario(text, source=f"preset:{name}", overrides=overrides)
