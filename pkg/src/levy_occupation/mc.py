"""Monte Carlo oracle for the last-passage and first-passage laws.

Paths of X_t = sigma B_t + delta t - (compound Poisson, exponential sizes)
are simulated on a fixed grid of step dt with the exact jump times inserted
as extra grid points.  The occupation clock L accrues at the window rates
with the state at the left endpoint of each subinterval deciding membership
of (a, b); last-passage times sigma^+/-/{0} and the corridor exit are
located by linear interpolation inside the crossing subinterval.

Randomness is drawn from one counter-based Philox stream per path, keyed by
(seed, path_index), in a fixed order (kill time, jump gaps, jump sizes,
normals, bridge uniforms), so estimates are bit-identical no matter how
paths are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .kernels import OccupationWindow
from .models import ExponentialJumps, LevyModel

__all__ = ["SimConfig", "PathRecord", "McEstimate", "FUNCTIONALS",
           "simulate_functional", "simulate_paths", "sample_path",
           "density_histogram"]

# row layout of the per-path record produced by the kernel
EXIT_T, EXIT_SIDE, EXIT_L, EXIT_CREEP, EXIT_PRE, EXIT_POST = 0, 1, 2, 3, 4, 5
END_X, END_L = 6, 7
LP_T, LP_L, LP_TYPE, LP_PRE, LP_POST = 8, 9, 10, 11, 12
LM_T, LM_L, LM_ALIVE = 13, 14, 15
LZ_T, LZ_L = 16, 17
EXIT_L2, LP_L2, LM_L2, LZ_L2 = 18, 19, 20, 21
N_JUMPS = 22
ROW_LEN = 23

# sigma^+ termination types
_LP_NONE, _LP_CREEP, _LP_JUMP, _LP_ALIVE = 0.0, 1.0, 2.0, 3.0


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    n_paths: int = 10_000
    seed: int = 0
    horizon_cap: float = 50.0
    bridge_correction: bool = False

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if self.horizon_cap <= 0.0:
            raise ValueError("horizon_cap must be positive")
        if not 0 <= int(self.seed) < 2 ** 63:
            raise ValueError("seed must fit in a nonnegative 63-bit integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_effective: int
    dt_used: float


@dataclass(frozen=True)
class PathRecord:
    """One simulated path, reduced to its recorded events."""

    kill_time: float
    exit_time: float            # inf if the corridor was not left before kill
    exit_side: int              # +1 above d, -1 below c, 0 none
    exit_creep: bool
    L_at_exit: float
    x_end: float                # X at the kill time
    L_end: float
    sigma_plus: float           # 0.0 when the half-line was never visited
    L_at_sigma_plus: float
    sigma_plus_kind: str        # "none" | "creep" | "jump" | "alive"
    x_before_sigma_plus: float
    x_after_sigma_plus: float
    sigma_minus: float
    L_at_sigma_minus: float
    sigma_minus_alive: bool     # True iff X(e_lambda) < 0 (density class)
    sigma_zero: float
    L_at_sigma_zero: float
    n_jumps: int


@njit(cache=True)
def _path_kernel(x0, t_end, dt, sig, mu, jtimes, jsizes, normals, uniforms,
                 use_bridge, a1, b1, p1, q1, a2, b2, p2, q2, c, d,
                 use_corridor, stop_at_exit, bin_lo, bin_w, nbins,
                 bins, row):
    t = 0.0
    X = x0
    L = 0.0   # clock of window 1
    M = 0.0   # clock of window 2
    nj = jtimes.shape[0]
    ji = 0
    ni = 0
    ui = 0
    k = 1
    exit_t = np.inf
    exit_side = 0.0
    exit_L = 0.0
    exit_M = 0.0
    exit_creep = 0.0
    exit_pre = 0.0
    exit_post = 0.0
    lp_t = 0.0
    lp_L = 0.0
    lp_M = 0.0
    lp_type = _LP_NONE
    lp_pre = 0.0
    lp_post = 0.0
    lm_t = 0.0
    lm_L = 0.0
    lm_M = 0.0
    lz_t = 0.0
    lz_L = 0.0
    lz_M = 0.0
    done = False
    while t < t_end - 1e-12 and not done:
        t_tick = k * dt
        t_next = t_tick if t_tick < t_end else t_end
        is_jump = False
        if ji < nj and jtimes[ji] <= t_next:
            t_next = jtimes[ji]
            is_jump = True
        h = t_next - t
        rate1 = q1 if (a1 < X) and (X < b1) else p1
        rate2 = q2 if (a2 < X) and (X < b2) else p2
        if h > 0.0:
            z = normals[ni]
            ni += 1
            Xn = X + mu * h + sig * math.sqrt(h) * z
            was_inside = exit_side == 0.0
            if use_corridor == 1 and exit_side == 0.0:
                if Xn >= d:
                    s = h * ((d - X) / (Xn - X))
                    exit_t = t + s
                    exit_side = 1.0
                    exit_L = L + rate1 * s
                    exit_M = M + rate2 * s
                    exit_creep = 1.0
                    exit_pre = d
                    exit_post = d
                    if stop_at_exit == 1:
                        done = True
                elif Xn <= c:
                    s = h * ((c - X) / (Xn - X))
                    exit_t = t + s
                    exit_side = -1.0
                    exit_L = L + rate1 * s
                    exit_M = M + rate2 * s
                    exit_creep = 1.0
                    exit_pre = c
                    exit_post = c
                    if stop_at_exit == 1:
                        done = True
                elif use_bridge == 1 and sig > 0.0:
                    # bridge tests for barrier excursions the endpoints
                    # missed; the crossing time is approximated by h/2.
                    # Tests with crossing probability below e^-40 are
                    # skipped without spending a draw.
                    v2 = sig * sig * h
                    hit_c = False
                    ec = 2.0 * (X - c) * (Xn - c)
                    if ec < 40.0 * v2:
                        pr = math.exp(-ec / v2)
                        u = uniforms[ui]
                        ui += 1
                        hit_c = u < pr
                    if hit_c:
                        exit_t = t + 0.5 * h
                        exit_side = -1.0
                        exit_L = L + rate1 * 0.5 * h
                        exit_M = M + rate2 * 0.5 * h
                        exit_creep = 1.0
                        exit_pre = c
                        exit_post = c
                        if stop_at_exit == 1:
                            done = True
                    else:
                        ed = 2.0 * (d - X) * (d - Xn)
                        if ed < 40.0 * v2:
                            pr = math.exp(-ed / v2)
                            u = uniforms[ui]
                            ui += 1
                            if u < pr:
                                exit_t = t + 0.5 * h
                                exit_side = 1.0
                                exit_L = L + rate1 * 0.5 * h
                                exit_M = M + rate2 * 0.5 * h
                                exit_creep = 1.0
                                exit_pre = d
                                exit_post = d
                                if stop_at_exit == 1:
                                    done = True
            if nbins > 0 and was_inside:
                h_in = h if exit_side == 0.0 else exit_t - t
                bi = int((X - bin_lo) / bin_w)
                if 0 <= bi < nbins and h_in > 0.0:
                    if rate1 > 1e-14:
                        bins[bi] += math.exp(-L) * (1.0 - math.exp(-rate1 * h_in)) / rate1
                    else:
                        bins[bi] += math.exp(-L) * h_in
            if X > 0.0 and Xn <= 0.0:
                s = h * (X / (X - Xn))
                lp_t = t + s
                lp_L = L + rate1 * s
                lp_M = M + rate2 * s
                lp_type = _LP_CREEP
                lp_pre = 0.0
                lp_post = 0.0
                lz_t = lp_t
                lz_L = lp_L
                lz_M = lp_M
            elif X < 0.0 and Xn >= 0.0:
                s = h * (X / (X - Xn))
                lm_t = t + s
                lm_L = L + rate1 * s
                lm_M = M + rate2 * s
                lz_t = lm_t
                lz_L = lm_L
                lz_M = lm_M
            elif use_bridge == 1 and sig > 0.0 and (X != 0.0 or Xn != 0.0):
                # bridge test for an excursion past 0 inside a same-sign
                # segment; its time is approximated by h/2.  A dip from
                # positive territory is a short negative spell ended by a
                # continuous up-cross (and a hit of 0); a peek from below
                # is a short positive spell ended continuously.  A segment
                # leaving the level itself (X == 0, e.g. the start of a
                # run from the origin) crosses with probability one, on
                # the side opposite its endpoint.  Probabilities below
                # e^-40 are skipped without spending a draw.
                e0 = 2.0 * X * Xn
                if e0 < 40.0 * sig * sig * h:
                    pr = math.exp(-e0 / (sig * sig * h))
                    u = uniforms[ui]
                    ui += 1
                else:
                    pr = 0.0
                    u = 1.0
                if u < pr:
                    s = 0.5 * h
                    lz_t = t + s
                    lz_L = L + rate1 * s
                    lz_M = M + rate2 * s
                    if X > 0.0 or (X == 0.0 and Xn > 0.0):
                        lm_t = lz_t
                        lm_L = lz_L
                        lm_M = lz_M
                    else:
                        lp_t = lz_t
                        lp_L = lz_L
                        lp_M = lz_M
                        lp_type = _LP_CREEP
                        lp_pre = 0.0
                        lp_post = 0.0
            L += rate1 * h
            M += rate2 * h
            X = Xn
            t = t_next
        if is_jump:
            jsz = jsizes[ji]
            ji += 1
            Xj = X - jsz
            if X > 0.0 and Xj <= 0.0:
                lp_t = t
                lp_L = L
                lp_M = M
                lp_type = _LP_JUMP
                lp_pre = X
                lp_post = Xj
            if use_corridor == 1 and exit_side == 0.0 and Xj <= c:
                exit_t = t
                exit_side = -1.0
                exit_L = L
                exit_M = M
                exit_creep = 1.0 if Xj == c else 0.0
                exit_pre = X
                exit_post = Xj
                if stop_at_exit == 1:
                    done = True
            X = Xj
        elif t >= t_tick:
            k += 1
    if not done:
        if X > 0.0:
            lp_t = t_end
            lp_L = L
            lp_M = M
            lp_type = _LP_ALIVE
            lp_pre = X
            lp_post = X
        lm_alive = 1.0 if X < 0.0 else 0.0
        if X < 0.0:
            lm_t = t_end
            lm_L = L
            lm_M = M
    else:
        lm_alive = 1.0 if X < 0.0 else 0.0
    row[EXIT_T] = exit_t
    row[EXIT_SIDE] = exit_side
    row[EXIT_L] = exit_L
    row[EXIT_CREEP] = exit_creep
    row[EXIT_PRE] = exit_pre
    row[EXIT_POST] = exit_post
    row[END_X] = X
    row[END_L] = L
    row[LP_T] = lp_t
    row[LP_L] = lp_L
    row[LP_TYPE] = lp_type
    row[LP_PRE] = lp_pre
    row[LP_POST] = lp_post
    row[LM_T] = lm_t
    row[LM_L] = lm_L
    row[LM_ALIVE] = lm_alive
    row[LZ_T] = lz_t
    row[LZ_L] = lz_L
    row[EXIT_L2] = exit_M
    row[LP_L2] = lp_M
    row[LM_L2] = lm_M
    row[LZ_L2] = lz_M
    row[N_JUMPS] = float(ji)


def _model_key(model: LevyModel):
    if model.jumps is None:
        return (model.sigma, model.drift, 0.0, 0.0)
    if not isinstance(model.jumps, ExponentialJumps):
        raise ValueError("the simulator supports exponential jumps or none")
    return (model.sigma, model.drift, model.jumps.rate, model.jumps.alpha)


def _window_key(w: Optional[OccupationWindow]):
    if w is None:
        return (0.0, 0.0, 0.0, 0.0)
    return (w.p, w.q_in, w.a, w.b)


def _simulate_range(sigma, drift, jrate, jalpha, lam, x0, dt, seed, lo, hi,
                    win1, win2, corridor, stop_at_exit, horizon_cap,
                    use_bridge, bin_lo, bin_w, nbins):
    """Simulate paths lo..hi-1 and return (rows, bins)."""
    a1, b1, p1, q1 = win1[2], win1[3], win1[0], win1[1]
    a2, b2, p2, q2 = win2[2], win2[3], win2[0], win2[1]
    if corridor is None:
        use_corridor, c, d = 0, -np.inf, np.inf
    else:
        use_corridor, c, d = 1, corridor[0], corridor[1]
    rows = np.empty((hi - lo, ROW_LEN))
    bins = np.zeros((hi - lo, nbins)) if nbins > 0 else np.zeros((hi - lo, 1))
    empty = np.empty(0)
    for idx in range(lo, hi):
        gen = np.random.Generator(
            np.random.Philox(key=np.array([seed, idx], dtype=np.uint64)))
        if lam > 0.0:
            t_end = min(gen.exponential(1.0 / lam), horizon_cap)
        else:
            t_end = horizon_cap
        if jrate > 0.0:
            gaps = []
            acc = gen.exponential(1.0 / jrate)
            while acc < t_end:
                gaps.append(acc)
                acc += gen.exponential(1.0 / jrate)
            jtimes = np.array(gaps) if gaps else empty
            jsizes = gen.exponential(1.0 / jalpha, jtimes.shape[0]) \
                if jtimes.shape[0] else empty
        else:
            jtimes = empty
            jsizes = empty
        m = int(t_end / dt) + jtimes.shape[0] + 3
        normals = gen.standard_normal(m)
        uniforms = gen.random(3 * m) if use_bridge else empty
        _path_kernel(x0, t_end, dt, sigma, drift, jtimes, jsizes, normals,
                     uniforms, 1 if use_bridge else 0,
                     a1, b1, p1, q1, a2, b2, p2, q2, c, d,
                     use_corridor, 1 if stop_at_exit else 0,
                     bin_lo, bin_w, nbins, bins[idx - lo], rows[idx - lo])
    return rows, bins


def simulate_paths(model: LevyModel, lam: float, x: float, cfg: SimConfig,
                   corridor=None, window: Optional[OccupationWindow] = None,
                   window2: Optional[OccupationWindow] = None,
                   stop_at_exit: bool = False, jobs: int = 1,
                   n_bins: int = 0, bin_range=None, first_index: int = 0):
    """Run the path simulator and return the (n_paths, ROW_LEN) record
    array plus per-path occupation-density bins (window 1 clock),
    shaped (n_paths, n_bins).

    Results are bit-identical for any ``jobs``: every path owns a
    counter-based stream keyed by (seed, first_index + row), rows and
    bins are assembled in path order, and any reduction is left to the
    caller over the full ordered arrays.  ``first_index`` shifts the
    stream indices, for resuming or sharding a larger run by hand.
    """
    if model.sigma == 0.0 and model.jumps is None:
        raise ValueError("simulation needs a Gaussian part or jumps")
    sigma, drift, jrate, jalpha = _model_key(model)
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    if corridor is not None:
        if hasattr(corridor, "c"):
            c, d = float(corridor.c), float(corridor.d)
        else:
            c, d = float(corridor[0]), float(corridor[1])
        if not c < d:
            raise ValueError("corridor must satisfy c < d")
        if cfg.dt * abs(model.gamma) > (d - c) / 100.0:
            raise ValueError(
                "dt too coarse for the corridor: dt*|gamma| exceeds (d-c)/100")
        corridor = (c, d)
    if n_bins > 0:
        if bin_range is None:
            raise ValueError("n_bins > 0 requires bin_range")
        bin_lo, bin_hi = float(bin_range[0]), float(bin_range[1])
        bin_w = (bin_hi - bin_lo) / n_bins
    else:
        bin_lo, bin_w = 0.0, 1.0
    win1 = _window_key(window)
    win2 = _window_key(window2 if window2 is not None else window)
    args = (sigma, drift, jrate, jalpha, lam, float(x), cfg.dt, int(cfg.seed))
    tail = (win1, win2, corridor, stop_at_exit, cfg.horizon_cap,
            cfg.bridge_correction, bin_lo, bin_w, n_bins)
    n = cfg.n_paths
    base = int(first_index)
    if jobs <= 1 or n < 2 * jobs:
        rows, bins = _simulate_range(*args, base, base + n, *tail)
        return rows, bins
    # contiguous chunks placed back by offset, so the assembled arrays do
    # not depend on completion order
    edges = np.linspace(base, base + n, jobs + 1, dtype=int)
    rows = np.empty((n, ROW_LEN))
    bins = np.zeros((n, n_bins if n_bins > 0 else 1))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(_simulate_range, *args, int(lo), int(hi), *tail)
                for lo, hi in zip(edges[:-1], edges[1:])]
        for (lo, hi), fut in zip(zip(edges[:-1], edges[1:]), futs):
            part_rows, part_bins = fut.result()
            rows[lo - base:hi - base] = part_rows
            bins[lo - base:hi - base] = part_bins
    return rows, bins


def sample_path(model: LevyModel, x: float, t_end: float, cfg: SimConfig,
                corridor=None, window: Optional[OccupationWindow] = None,
                path_index: int = 0) -> PathRecord:
    """Simulate a single path to a fixed horizon and return its record."""
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")
    one = replace(cfg, n_paths=1, horizon_cap=t_end)
    rows, _ = simulate_paths(model, 0.0, x, one, corridor=corridor,
                             window=window, first_index=path_index)
    r = rows[0]
    kinds = {_LP_NONE: "none", _LP_CREEP: "creep", _LP_JUMP: "jump",
             _LP_ALIVE: "alive"}
    return PathRecord(
        kill_time=t_end,
        exit_time=float(r[EXIT_T]),
        exit_side=int(r[EXIT_SIDE]),
        exit_creep=bool(r[EXIT_CREEP]),
        L_at_exit=float(r[EXIT_L]),
        x_end=float(r[END_X]),
        L_end=float(r[END_L]),
        sigma_plus=float(r[LP_T]),
        L_at_sigma_plus=float(r[LP_L]),
        sigma_plus_kind=kinds[float(r[LP_TYPE])],
        x_before_sigma_plus=float(r[LP_PRE]),
        x_after_sigma_plus=float(r[LP_POST]),
        sigma_minus=float(r[LM_T]),
        L_at_sigma_minus=float(r[LM_L]),
        sigma_minus_alive=bool(r[LM_ALIVE]),
        sigma_zero=float(r[LZ_T]),
        L_at_sigma_zero=float(r[LZ_L]),
        n_jumps=int(r[N_JUMPS]),
    )


# ----------------------------------------------------------------------
# functional extraction
# ----------------------------------------------------------------------

def _l_col(which: int, base: int) -> int:
    if which == 0:
        return base
    return {EXIT_L: EXIT_L2, LP_L: LP_L2, LM_L: LM_L2, LZ_L: LZ_L2}[base]


def _w_last_plus(rows, win=0, **kw):
    ok = (rows[:, LP_T] > 0.0) & (rows[:, LP_T] <= rows[:, EXIT_T])
    return np.where(ok, np.exp(-rows[:, _l_col(win, LP_L)]), 0.0)


def _w_last_minus(rows, win=0, **kw):
    ok = (rows[:, LM_T] > 0.0) & (rows[:, LM_T] <= rows[:, EXIT_T])
    return np.where(ok, np.exp(-rows[:, _l_col(win, LM_L)]), 0.0)


def _w_last_minus_creep(rows, win=0, **kw):
    ok = (rows[:, LM_T] > 0.0) & (rows[:, LM_T] <= rows[:, EXIT_T]) \
        & (rows[:, LM_ALIVE] == 0.0)
    return np.where(ok, np.exp(-rows[:, _l_col(win, LM_L)]), 0.0)


def _w_last_minus_density(rows, win=0, **kw):
    ok = (rows[:, LM_T] > 0.0) & (rows[:, LM_T] <= rows[:, EXIT_T]) \
        & (rows[:, LM_ALIVE] == 1.0)
    return np.where(ok, np.exp(-rows[:, _l_col(win, LM_L)]), 0.0)


def _w_last_zero(rows, win=0, **kw):
    ok = (rows[:, LZ_T] > 0.0) & (rows[:, LZ_T] <= rows[:, EXIT_T])
    return np.where(ok, np.exp(-rows[:, _l_col(win, LZ_L)]), 0.0)


def _w_last_plus_creep(rows, win=0, **kw):
    ok = (rows[:, LP_T] > 0.0) & (rows[:, LP_T] <= rows[:, EXIT_T]) \
        & (rows[:, LP_TYPE] == _LP_CREEP)
    return np.where(ok, np.exp(-rows[:, _l_col(win, LP_L)]), 0.0)


def _w_p_sigma0_plus(rows, **kw):
    return (rows[:, LP_T] == 0.0).astype(float)


def _w_p_sigma0_minus(rows, **kw):
    return (rows[:, LM_T] == 0.0).astype(float)


def _w_p_sigma0_zero(rows, **kw):
    return (rows[:, LZ_T] == 0.0).astype(float)


def _w_exit_up(rows, win=0, **kw):
    ok = rows[:, EXIT_SIDE] == 1.0
    return np.where(ok, np.exp(-rows[:, _l_col(win, EXIT_L)]), 0.0)


def _w_exit_down(rows, win=0, **kw):
    ok = rows[:, EXIT_SIDE] == -1.0
    return np.where(ok, np.exp(-rows[:, _l_col(win, EXIT_L)]), 0.0)


def _w_exit_down_creep(rows, win=0, **kw):
    ok = (rows[:, EXIT_SIDE] == -1.0) & (rows[:, EXIT_CREEP] == 1.0)
    return np.where(ok, np.exp(-rows[:, _l_col(win, EXIT_L)]), 0.0)


def _w_exit_down_overshoot(rows, win=0, v=0.0, level=0.0, **kw):
    # e^{-L(tau_c^-)} e^{v (X(tau) - c)}; X(tau) - c = post - c <= 0
    ok = rows[:, EXIT_SIDE] == -1.0
    w = np.exp(-rows[:, _l_col(win, EXIT_L)] + v * (rows[:, EXIT_POST] - level))
    return np.where(ok, w, 0.0)


def _w_exit_any(rows, win=0, **kw):
    ok = rows[:, EXIT_SIDE] != 0.0
    return np.where(ok, np.exp(-rows[:, _l_col(win, EXIT_L)]), 0.0)


FUNCTIONALS = {
    # last-passage transforms E_x[e^{-L(sigma)}; 0 < sigma <= tau], full run
    "last_total_plus": (_w_last_plus, False),
    "last_total_minus": (_w_last_minus, False),
    "last_total_zero": (_w_last_zero, False),
    "last_minus_creep": (_w_last_minus_creep, False),
    "last_minus_density": (_w_last_minus_density, False),
    "last_plus_creep": (_w_last_plus_creep, False),
    # never-visited probabilities, full run
    "p_sigma0_plus": (_w_p_sigma0_plus, False),
    "p_sigma0_minus": (_w_p_sigma0_minus, False),
    "p_sigma0_zero": (_w_p_sigma0_zero, False),
    # first-passage transforms, may stop at the corridor exit
    "exit_up": (_w_exit_up, True),
    "exit_down": (_w_exit_down, True),
    "exit_down_creep": (_w_exit_down_creep, True),
    "exit_down_overshoot": (_w_exit_down_overshoot, True),
    "exit_any": (_w_exit_any, True),
}


def _estimate(weights: np.ndarray, dt: float) -> McEstimate:
    n = weights.shape[0]
    mean = float(np.mean(weights))
    se = float(np.std(weights, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return McEstimate(mean=mean, std_error=se, n_effective=n, dt_used=dt)


def simulate_functional(model: LevyModel, window: Optional[OccupationWindow],
                        corridor, lam: float, x: float, functional_id: str,
                        cfg: SimConfig, jobs: int = 1,
                        **params) -> McEstimate:
    """Estimate one registered expectation; see FUNCTIONALS for ids."""
    if functional_id not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional_id!r}")
    extract, may_stop = FUNCTIONALS[functional_id]
    if functional_id in ("last_total_zero", "p_sigma0_zero") and model.sigma == 0.0:
        raise ValueError("hitting-time functionals need sigma > 0 "
                         "(point hits of pure-jump paths are not simulable)")
    rows, _ = simulate_paths(model, lam, x, cfg, corridor=corridor,
                             window=window, stop_at_exit=may_stop, jobs=jobs)
    return _estimate(extract(rows, win=0, **params), cfg.dt)


def density_histogram(model: LevyModel, window: Optional[OccupationWindow],
                      corridor, lam: float, x: float, cfg: SimConfig,
                      n_bins: int, bin_range, jobs: int = 1):
    """MC estimate of the occupation density y -> int e^{-L} 1{X in dy} dt
    (up to the corridor exit when one is given): bin centers, density
    values and per-bin standard errors.  An e_lambda kill can either be
    passed as lam or folded into the window rates by lambda-shifting."""
    rows, bins = simulate_paths(model, lam, x, cfg, corridor=corridor,
                                window=window, stop_at_exit=corridor is not None,
                                n_bins=n_bins, bin_range=bin_range, jobs=jobs)
    lo, hi = float(bin_range[0]), float(bin_range[1])
    w = (hi - lo) / n_bins
    centers = lo + w * (np.arange(n_bins) + 0.5)
    dens = np.mean(bins, axis=0) / w
    se = np.std(bins, axis=0, ddof=1) / (w * math.sqrt(cfg.n_paths))
    return centers, dens, se
