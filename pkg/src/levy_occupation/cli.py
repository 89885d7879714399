"""Batch front-end: formula evaluation, MC validation and grid tables.

Subcommands
-----------
eval      rows of analytic values (with sub-term breakdown) per (x, quantity)
validate  analytic-vs-MC battery, pass/fail at the 3*SE-or-2% rule
table     CSV tabulation of a density over an (x, y) grid
simulate  one registered MC functional, reported as mean/SE

All randomness flows from the single ``seed`` key; ``--jobs`` only
distributes paths over workers and never changes any reported number.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Optional

import numpy as np

from . import lastpassage as lp
from .config import (ConfigError, RunConfig, build_run_config, load_config,
                     parse_config_text, serialize_config)
from .kernels import KernelEval, OccupationWindow
from .lastpassage import (Corridor, LastPassageQuery, SigmaKind,
                          classical_potential_density,
                          corridor_resolvent_density,
                          global_resolvent_density, last_down_creep,
                          last_hit, last_totals, prob_sigma_zero)
from .mc import FUNCTIONALS, SimConfig, simulate_functional, simulate_paths

__all__ = ["main", "cmd_eval", "cmd_validate", "cmd_table", "cmd_simulate",
           "battery_checks"]

_KINDS = {"plus": SigmaKind.PLUS, "minus": SigmaKind.MINUS,
          "zero": SigmaKind.ZERO}


# ----------------------------------------------------------------------
# eval
# ----------------------------------------------------------------------

def _query(run: RunConfig, x: float, kind: SigmaKind) -> LastPassageQuery:
    if run.window is None or run.corridor is None:
        raise ConfigError("quantity needs window.* and corridor.* settings")
    return LastPassageQuery(model=run.model, window=run.window,
                            corridor=run.corridor, lam=run.lam, x=x,
                            kind=kind, quad=run.quad)


def _eval_quantity(run: RunConfig, quantity: str, x: float):
    """Return (value, sub_terms) for one eval row."""
    if quantity.startswith("last_totals."):
        kind = _KINDS[quantity.split(".", 1)[1]]
        q = _query(run, x, kind)
        value = last_totals(q)
        sub = {"u_at_zero": q.u(0.0)}
        if kind == SigmaKind.MINUS:
            sub["creep_term"] = last_down_creep(q)
            sub["density_term"] = value - sub["creep_term"]
        elif kind == SigmaKind.PLUS:
            meas = lp.last_up_measure(q)
            sub["atom_term"] = meas.atom_at_zero
        else:
            sub["psi_prime_at_phi"] = value / q.u(0.0) if q.u(0.0) else 0.0
        return value, sub
    if quantity.startswith("prob_sigma_zero."):
        kind = _KINDS[quantity.split(".", 1)[1]]
        return prob_sigma_zero(run.model, run.lam, x, kind), {}
    if quantity == "last_down_creep":
        q = _query(run, x, SigmaKind.MINUS)
        return last_down_creep(q), {"u_at_zero": q.u(0.0)}
    if quantity == "last_hit":
        q = _query(run, x, SigmaKind.ZERO)
        return last_hit(q), {"u_at_zero": q.u(0.0)}
    raise ConfigError(f"unknown quantity {quantity!r}")


def cmd_eval(run: RunConfig) -> list:
    if not run.xs:
        raise ConfigError("x grid must not be empty")
    if not run.quantity:
        raise ConfigError("eval needs a quantity setting")
    rows = []
    for x in run.xs:
        t0 = time.perf_counter()
        value, sub = _eval_quantity(run, run.quantity, x)
        rows.append({"x": x, "quantity": run.quantity, "value": value,
                     "sub_terms": sub,
                     "wall_ms": (time.perf_counter() - t0) * 1e3})
    return rows


# ----------------------------------------------------------------------
# validate
# ----------------------------------------------------------------------

_BATTERY_TRANSFORMS = (
    ("last_total_plus", SigmaKind.PLUS, last_totals),
    ("last_total_minus", SigmaKind.MINUS, last_totals),
    ("last_total_zero", SigmaKind.ZERO, last_totals),
    ("last_minus_creep", SigmaKind.MINUS, last_down_creep),
)


def battery_checks(run: RunConfig) -> list:
    """The standard battery: per window the four last-passage transforms,
    plus the three never-visited probabilities, at every x."""
    if run.window is None or run.corridor is None:
        raise ConfigError("validate needs window.* and corridor.* settings")
    if not run.xs:
        raise ConfigError("x grid must not be empty")
    windows = [(0, run.window)]
    if run.window2 is not None:
        windows.append((1, run.window2))
    checks = []
    for x in run.xs:
        for wi, w in windows:
            for fid, kind, fn in _BATTERY_TRANSFORMS:
                checks.append({"name": f"{fid}/w{wi}/x{x:g}", "functional": fid,
                               "win": wi, "window": w, "x": x, "kind": kind,
                               "fn": fn})
        for kind in SigmaKind:
            fid = "p_sigma0_" + kind.value
            checks.append({"name": f"{fid}/x{x:g}", "functional": fid,
                           "win": 0, "window": run.window, "x": x,
                           "kind": kind, "fn": None})
    if run.checks:
        checks = [ch for ch in checks
                  if any(sel in ch["name"] for sel in run.checks)]
        if not checks:
            raise ConfigError("check selection matched nothing")
    return checks


def _analytic_value(run: RunConfig, ch: dict) -> float:
    if ch["fn"] is None:
        return prob_sigma_zero(run.model, run.lam, ch["x"], ch["kind"])
    q = LastPassageQuery(model=run.model, window=ch["window"],
                         corridor=run.corridor, lam=run.lam, x=ch["x"],
                         kind=ch["kind"], quad=run.quad)
    return ch["fn"](q)


def cmd_validate(run: RunConfig) -> dict:
    checks = battery_checks(run)
    xs_needed = sorted({ch["x"] for ch in checks})
    cache = {}
    for x in xs_needed:
        cache[x], _ = simulate_paths(
            run.model, run.lam, x, run.sim,
            corridor=(run.corridor.c, run.corridor.d), window=run.window,
            window2=run.window2, jobs=run.jobs)
    rows = []
    all_pass = True
    for ch in checks:
        analytic = _analytic_value(run, ch)
        extract, _ = FUNCTIONALS[ch["functional"]]
        weights = extract(cache[ch["x"]], win=ch["win"])
        n = weights.shape[0]
        mean = float(np.mean(weights))
        se = float(np.std(weights, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        z = (mean - analytic) / se if se > 0.0 else 0.0
        tol = max(3.0 * se, 0.02 * max(1.0, abs(analytic)))
        ok = abs(mean - analytic) <= tol
        underpowered = n < 1000 or se > 0.1 * max(abs(analytic), 1e-2)
        all_pass = all_pass and ok
        rows.append({"check": ch["name"], "analytic": analytic,
                     "mc_mean": mean, "se": se, "z": z, "pass": ok,
                     "underpowered": underpowered})
    return {"checks": rows, "all_pass": all_pass, "n_paths": run.sim.n_paths,
            "dt": run.sim.dt, "seed": run.sim.seed}


# ----------------------------------------------------------------------
# table
# ----------------------------------------------------------------------

def _table_value(run: RunConfig, x: float, y: float) -> float:
    name = run.quantity or "corridor_resolvent"
    if name == "corridor_resolvent":
        return corridor_resolvent_density(run.model, run.window, run.corridor,
                                          x, y, lam=run.lam, quad=run.quad)
    if name == "global_resolvent":
        return global_resolvent_density(run.model, run.window, x, y,
                                        quad=run.quad)
    if name == "potential":
        return classical_potential_density(run.model, run.lam, x, y)
    raise ConfigError(f"unknown table quantity {name!r}")


def cmd_table(run: RunConfig) -> str:
    """CSV text: one row per (x, y), x-major order, %.12g numbers.  With
    p = q a closed-form column and its difference are appended."""
    if not run.xs:
        raise ConfigError("x grid must not be empty")
    if not run.ys:
        raise ConfigError("y grid must not be empty")
    name = run.quantity or "corridor_resolvent"
    collapse = (run.window is not None and run.window.p == run.window.q_in
                and name == "corridor_resolvent")
    header = "x,y,value"
    ker = None
    if collapse:
        header += ",closed_form,diff"
        ker = KernelEval(run.model,
                         run.window.shifted(run.lam) if run.lam else run.window,
                         run.quad)
    lines = [header]
    for x in run.xs:
        for y in run.ys:
            if collapse:
                # generic two-kernel ratio against the grouped closed form
                c, d = run.corridor.c, run.corridor.d
                value = (ker.calW_ab(x, c) * ker.calW_ab(d, y)
                         / ker.calW_ab(d, c) - ker.calW_ab(x, y))
                closed = _table_value(run, x, y)
                lines.append(f"{x:.12g},{y:.12g},{value:.12g},{closed:.12g},"
                             f"{value - closed:.12g}")
            else:
                lines.append(f"{x:.12g},{y:.12g},{_table_value(run, x, y):.12g}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def cmd_simulate(run: RunConfig) -> dict:
    if not run.quantity:
        raise ConfigError("simulate needs a quantity (functional id)")
    if not run.xs:
        raise ConfigError("x grid must not be empty")
    corridor = None
    if run.corridor is not None:
        corridor = (run.corridor.c, run.corridor.d)
    est = simulate_functional(run.model, run.window, corridor, run.lam,
                              run.xs[0], run.quantity, run.sim, jobs=run.jobs)
    return {"functional": run.quantity, "x": run.xs[0], "mean": est.mean,
            "std_error": est.std_error, "n_effective": est.n_effective,
            "dt_used": est.dt_used}


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _write_out(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="levyocc",
                                 description="occupation-clock last-passage "
                                             "calculator and MC validator")
    ap.add_argument("command", choices=["eval", "validate", "table", "simulate"])
    ap.add_argument("--config", required=True, help="flat key=value or JSON file")
    ap.add_argument("--out", default=None, help="output path (default stdout)")
    ap.add_argument("--seed", type=int, default=None, help="override seed")
    ap.add_argument("--jobs", type=int, default=None, help="worker processes")
    ns = ap.parse_args(argv)
    try:
        flat = load_config(ns.config)
        if ns.seed is not None:
            flat["seed"] = ns.seed
        if ns.jobs is not None:
            flat["jobs"] = ns.jobs
        if ns.out is not None:
            flat["out"] = ns.out
        run = build_run_config(flat)
        if ns.command == "eval":
            _write_out(json.dumps({"rows": cmd_eval(run)}, indent=2,
                                  sort_keys=True) + "\n", run.out)
            return 0
        if ns.command == "validate":
            report = cmd_validate(run)
            _write_out(json.dumps(report, indent=2, sort_keys=True) + "\n",
                       run.out)
            return 0 if report["all_pass"] else 1
        if ns.command == "table":
            _write_out(cmd_table(run), run.out)
            return 0
        report = cmd_simulate(run)
        _write_out(json.dumps(report, indent=2, sort_keys=True) + "\n", run.out)
        return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
