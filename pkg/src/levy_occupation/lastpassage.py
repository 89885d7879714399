"""Laws of last passage times of a spectrally negative Levy process under an
occupation-weighted clock, observed up to an independent exponential time.

With e_lam an independent Exp(lam) time, the three last times studied are

    sigma_plus  = last s < e_lam with X_s > 0,
    sigma_minus = last s < e_lam with X_s < 0,
    sigma_hit   = last s < e_lam with X_s = 0,

and the clock L accrues at rate p outside a window (a, b) and q inside it.
Everything here evaluates E_x[ e^{-L(sigma)} ; 0 < sigma <= tau ] style
quantities restricted to a corridor [c, d] (tau the first exit time), plus
the classical single-rate exit and potential formulas they are built from.

The central object is the corridor resolvent

    u(x, y) = calW_ab(x, c) calW_ab(d, y) / calW_ab(d, c) - calW_ab(x, y),

evaluated with the clock rates raised by lam; last-passage laws are u
integrated against an intensity measure mu whose transform is

    mu_hat(s) = phi(lam) (psi(s) - lam) / (s (s - phi(lam))),

i.e. an atom sigma^2 phi(lam)/2 at 0 plus density lam + nu(y) on (0, inf),
nu the discounted jump-measure tail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from ._quad import QuadSettings, integrate_smooth
from .kernels import KernelEval, OccupationWindow
from .models import LevyModel
from .scale import ScaleEval

__all__ = [
    "Corridor",
    "SigmaKind",
    "LastPassageQuery",
    "MeasureValue",
    "LastInftyValue",
    "classical_exit",
    "classical_potential_density",
    "first_passage_occupation",
    "global_resolvent_density",
    "corridor_resolvent_density",
    "corridor_resolvent_apply",
    "mu_hat",
    "mu_measure",
    "last_up_measure",
    "last_up_jump_density",
    "last_down_density",
    "last_down_creep",
    "last_hit",
    "last_totals",
    "last_infty",
    "prob_sigma_zero",
    "joint_laws",
    "example_pq_equal",
]


class SigmaKind(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"


@dataclass(frozen=True)
class Corridor:
    """Observation corridor [c, d] with c < 0 < d."""

    c: float
    d: float

    def __post_init__(self):
        if not (self.c < 0.0 < self.d):
            raise ValueError("corridor requires c < 0 < d")


@dataclass(frozen=True)
class LastPassageQuery:
    """One fully-specified last-passage evaluation.

    The occupation window must sit inside the corridor
    (c <= a <= b <= d) and the start point x inside [c, d].
    """

    model: LevyModel
    window: OccupationWindow
    corridor: Corridor
    lam: float
    x: float
    kind: SigmaKind = SigmaKind.PLUS
    quad: QuadSettings = QuadSettings()

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError("lam must be nonnegative")
        c, d = self.corridor.c, self.corridor.d
        if not (c <= self.window.a <= self.window.b <= d):
            raise ValueError("window must satisfy c <= a <= b <= d")
        if not (c <= self.x <= d):
            raise ValueError("start point x must lie in the corridor [c, d]")

    @cached_property
    def kernels(self) -> KernelEval:
        """Kernels at the lam-shifted rates (p + lam, q + lam)."""
        return KernelEval(self.model, self.window.shifted(self.lam), self.quad)

    @cached_property
    def kernels_unshifted(self) -> KernelEval:
        return KernelEval(self.model, self.window, self.quad)

    @cached_property
    def scale_lam(self) -> ScaleEval:
        return ScaleEval(self.model, self.lam)

    @property
    def phi_lam(self) -> float:
        return self.model.phi(self.lam)

    def u(self, y: float) -> float:
        """Corridor resolvent at the lam-shifted rates, evaluated at (x, y)."""
        return _resolvent_from_kernels(self.kernels, self.corridor, self.x, y)


@dataclass(frozen=True)
class MeasureValue:
    """A measure on an interval: a density plus a possible atom at zero."""

    density: Callable[[float], float]
    atom_at_zero: float
    support: tuple


@dataclass(frozen=True)
class LastInftyValue:
    """Value for a perpetual (lam = 0) last-passage quantity; ``time_finite``
    is False when the relevant last time is almost surely infinite, in which
    case ``value`` is 0."""

    value: float
    time_finite: bool


# ----------------------------------------------------------------------
# classical single-rate formulas
# ----------------------------------------------------------------------

def _down_ratio(model: LevyModel, q: float) -> float:
    """q / phi(q), continued as psi'(0+) when q = 0 and phi(0) = 0."""
    if q > 0.0:
        return q / model.phi(q)
    ph0 = model.phi(0.0)
    return model.psi_prime0() if ph0 == 0.0 else 0.0


def classical_exit(model: LevyModel, q: float, x: float, mode: str,
                   c: Optional[float] = None, d: Optional[float] = None,
                   v: float = 0.0, level: Optional[float] = None) -> float:
    """Single-rate first-passage transforms.

    Modes (all discounted at rate q):

    * ``"up"``      — reach level d from x below it: e^{-phi(q)(d - x)}.
    * ``"down"``    — pass below level c: Z^{(q)}(x-c) - (q/phi(q)) W^{(q)}(x-c).
    * ``"up_two"``  — reach d before passing below c: W ratio.
    * ``"down_two"``— pass below c before reaching d, with overshoot weight
      e^{v X(tau_c^-)} (v >= 0), via tilted scale functions.
    * ``"creep"``   — pass below c continuously (X(tau_c^-) = c);
      identically 0 when sigma = 0.
    * ``"hit"``     — first hit of ``level`` exactly, from x.
    """
    if q < 0.0:
        raise ValueError("q must be nonnegative")
    if mode == "up":
        if d is None:
            raise ValueError("mode 'up' requires d")
        return 1.0 if x >= d else math.exp(-model.phi(q) * (d - x))
    if mode == "down":
        if c is None:
            raise ValueError("mode 'down' requires c")
        if x <= c:
            return 1.0
        sc = ScaleEval(model, q)
        return float(sc.Z(x - c) - _down_ratio(model, q) * sc.W(x - c))
    if mode == "up_two":
        if c is None or d is None:
            raise ValueError("mode 'up_two' requires c and d")
        sc = ScaleEval(model, q)
        return float(sc.W(x - c) / sc.W(d - c))
    if mode == "down_two":
        if c is None or d is None:
            raise ValueError("mode 'down_two' requires c and d")
        if v < 0.0:
            raise ValueError("overshoot weight v must be nonnegative")
        # E_x[e^{-q tau_c^- + v (X(tau_c^-) - c)}; tau_c^- <= tau_d^+], then
        # shifted by e^{v c}: tilted scale functions at order q - psi(v),
        # realized through the order-q evaluator.
        sc = ScaleEval(model, q)
        p_eff = q - float(model.psi(v))
        xc, dc = x - c, d - c
        w_t = lambda z: math.exp(-v * z) * sc.W(z)
        z_t = lambda z: 1.0 + p_eff * sc.integral_exp_weighted(v, z)
        return math.exp(v * xc) * (z_t(xc) - w_t(xc) * z_t(dc) / w_t(dc))
    if mode == "creep":
        if c is None:
            raise ValueError("mode 'creep' requires c")
        if model.sigma == 0.0:
            return 0.0
        sc = ScaleEval(model, q)
        w = x - c
        return float(0.5 * model.sigma ** 2
                     * (sc.W_prime(w) - model.phi(q) * sc.W(w)))
    if mode == "hit":
        if level is None:
            raise ValueError("mode 'hit' requires level")
        m = level - x
        sc = ScaleEval(model, q)
        # W(-m) vanishes for m > 0, so this covers hitting from either side
        return float(math.exp(-model.phi(q) * m) - sc.W(-m) / model.phi_prime(q))
    raise ValueError(f"unknown mode {mode!r}")


def classical_potential_density(model: LevyModel, q: float, x: float, y: float) -> float:
    """Density of the q-potential of the process killed on passing below 0:
    e^{-phi(q) y} W^{(q)}(x) - W^{(q)}(x - y), for x, y >= 0."""
    sc = ScaleEval(model, q)
    return float(math.exp(-model.phi(q) * y) * sc.W(x) - sc.W(x - y))


# ----------------------------------------------------------------------
# occupation-clock exit and resolvents
# ----------------------------------------------------------------------

def first_passage_occupation(model: LevyModel, window: OccupationWindow, x: float,
                             d: float, c: Optional[float] = None,
                             quad: Optional[QuadSettings] = None,
                             kernels: Optional[KernelEval] = None) -> float:
    """E_x[e^{-L(tau_d^+)}; tau_d^+ < tau_c^-], or with tau_d^+ < inf when
    c is None (one-sided); the one-sided denominator is calH_ab(d)."""
    ker = kernels or KernelEval(model, window, quad)
    if c is not None:
        return ker.calW_ab(x, c) / ker.calW_ab(d, c)
    return ker.calH_ab(x) / ker.calH_ab(d)


def _free_potential_density(scale: ScaleEval, w: float) -> float:
    """phi'(q) e^{phi(q) w} - W^{(q)}(w), computed without cancellation for
    w >= 0 by dropping the leading partial-fraction term of W."""
    ph = scale.phi_q
    if w < 0.0:
        return scale.model.phi_prime(scale.q) * math.exp(ph * w)
    terms = getattr(scale, "_terms", None)
    if terms is None or any(len(cs) > 1 for _, cs in terms):
        return scale.model.phi_prime(scale.q) * math.exp(ph * w) - scale.W(w)
    # the leading partial-fraction term of W is phi'(q) e^{phi(q) w}; the
    # difference is exactly minus the subdominant terms
    lead = max(range(len(terms)), key=lambda i: terms[i][0].real)
    acc = 0.0j
    for i, (theta, cs) in enumerate(terms):
        if i != lead:
            acc -= cs[0] * np.exp(theta * w)
    return float(np.real(acc))


def global_resolvent_density(model: LevyModel, window: OccupationWindow,
                             x: float, y: float,
                             quad: Optional[QuadSettings] = None,
                             kernels: Optional[KernelEval] = None) -> float:
    """Occupation-discounted potential density with no corridor,
    int_0^inf E_x[e^{-L(t)}; X_t in dy] dt / dy.

    Requires p > 0, or p = 0 with psi'(0+) > 0 (otherwise the expected
    undiscounted time at a point is infinite).
    """
    w = window
    if w.p == 0.0 and model.psi_prime0() <= 0.0:
        raise ValueError("global resolvent diverges: p = 0 needs psi'(0+) > 0")
    ker = kernels or KernelEval(model, w, quad)
    if w.p == w.q_in:
        return _free_potential_density(ker.Wp, x - y)
    php = ker.phi_p
    qs = ker.quad
    tail = integrate_smooth(
        lambda z: np.exp(-php * z) * np.array([ker.calH_origin(float(v)) for v in z]),
        0.0, w.b - w.a, (), qs)
    denom = float(model.psi_prime(php)) + (w.q_in - w.p) * tail
    lead = math.exp(-php * (w.a + w.b)) * ker.calH_ab(x) * ker.calH_ab(w.a + w.b - y) / denom
    return lead - ker.calW_ab(x, y)


def _collapsed_resolvent(scale: ScaleEval, x: float, y: float, c: float, d: float) -> float:
    """Corridor resolvent for equal rates, u = W(x-c)W(d-y)/W(d-c) - W(x-y),
    with the leading exponentials grouped so wide corridors do not lose the
    result to cancellation."""
    ph = scale.phi_q
    terms = getattr(scale, "_terms", None)
    simple = terms is not None and all(len(cs) == 1 for _, cs in terms)
    if ph * (d - c) <= 16.0 or not simple:
        return float(scale.W(x - c) * scale.W(d - y) / scale.W(d - c) - scale.W(x - y))
    th = np.array([t for t, _ in terms])
    wcoef = np.array([cs[0] for _, cs in terms])
    lead = int(np.argmax(th.real))
    others = [i for i in range(len(th)) if i != lead]
    rho = sum((wcoef[i] / wcoef[lead]) * np.exp((th[i] - th[lead]) * (d - c)) for i in others)
    acc = 0.0j
    for i in range(len(th)):
        for j in range(len(th)):
            if i == lead and j == lead:
                continue
            e_ij = th[i] * (x - c) + th[j] * (d - y) - th[lead] * (d - c)
            acc += (wcoef[i] * wcoef[j] / wcoef[lead]) * np.exp(e_ij) / (1.0 + rho)
    if x >= y:
        # the (lead, lead) ratio term and the lead term of W(x - y) cancel
        # up to the relative weight rho of the subdominant roots
        acc -= wcoef[lead] * np.exp(th[lead] * (x - y)) * rho / (1.0 + rho)
        for i in others:
            acc -= wcoef[i] * np.exp(th[i] * (x - y))
    else:
        acc += wcoef[lead] * np.exp(th[lead] * (x - y)) / (1.0 + rho)
    return float(np.real(acc))


def _resolvent_from_kernels(ker: KernelEval, corridor: Corridor, x: float, y: float) -> float:
    c, d = corridor.c, corridor.d
    w = ker.window
    if w.p == w.q_in or w.a == w.b:
        return _collapsed_resolvent(ker.Wp, x, y, c, d)
    return ker.calW_ab(x, c) * ker.calW_ab(d, y) / ker.calW_ab(d, c) - ker.calW_ab(x, y)


def corridor_resolvent_density(model: LevyModel, window: OccupationWindow,
                               corridor: Corridor, x: float, y: float,
                               lam: float = 0.0,
                               quad: Optional[QuadSettings] = None,
                               kernels: Optional[KernelEval] = None) -> float:
    """Density in y of int_0^tau e^{-L(t) - lam t} 1{X_t in dy} dt from x,
    tau the first exit from [c, d]."""
    if not (corridor.c <= x <= corridor.d and corridor.c <= y <= corridor.d):
        raise ValueError("x and y must lie in the corridor")
    ker = kernels or KernelEval(model, window.shifted(lam) if lam else window, quad)
    return _resolvent_from_kernels(ker, corridor, x, y)


def corridor_resolvent_apply(model: LevyModel, window: OccupationWindow,
                             corridor: Corridor, x: float,
                             f: Callable[[np.ndarray], np.ndarray],
                             lam: float = 0.0,
                             quad: Optional[QuadSettings] = None,
                             kernels: Optional[KernelEval] = None,
                             breaks: tuple = ()) -> float:
    """int_c^d u(x, y) f(y) dy with panel splits at the kernel kinks."""
    ker = kernels or KernelEval(model, window.shifted(lam) if lam else window, quad)
    qs = quad or QuadSettings()
    c, d = corridor.c, corridor.d

    def integrand(ys: np.ndarray) -> np.ndarray:
        u_vals = np.array([_resolvent_from_kernels(ker, corridor, x, float(y)) for y in ys])
        return u_vals * f(ys)

    cuts = (window.a, window.b, x, 0.0) + tuple(breaks)
    return integrate_smooth(integrand, c, d, cuts, qs)


# ----------------------------------------------------------------------
# the intensity measure mu
# ----------------------------------------------------------------------

def mu_hat(model: LevyModel, lam: float, s: float) -> float:
    """Laplace transform phi(lam)(psi(s) - lam)/(s (s - phi(lam))) of the
    last-passage intensity measure; the removable singularity at s =
    phi(lam) evaluates to psi'(phi(lam)), and mu_hat(0+) = +inf."""
    if lam <= 0.0:
        raise ValueError("mu_hat requires lam > 0")
    if s < 0.0:
        raise ValueError("mu_hat requires s >= 0")
    if s == 0.0:
        return math.inf
    ph = model.phi(lam)
    if abs(s - ph) <= 1e-6 * max(1.0, ph):
        # second-order expansion through the removable singularity
        d1 = float(model.psi_prime(ph))
        d2 = float(model.psi_double_prime(ph))
        return ph * (d1 + 0.5 * (s - ph) * d2) / s
    return ph * (float(model.psi(s)) - lam) / (s * (s - ph))


def mu_measure(model: LevyModel, lam: float) -> MeasureValue:
    """Atom sigma^2 phi(lam)/2 at zero plus density lam + nu(y) on (0, inf)."""
    if lam <= 0.0:
        raise ValueError("mu_measure requires lam > 0")
    atom = 0.5 * model.sigma ** 2 * model.phi(lam)

    def density(y):
        return lam + model.levy_tail_integral(y, lam)

    return MeasureValue(density=density, atom_at_zero=atom, support=(0.0, math.inf))


# ----------------------------------------------------------------------
# last-passage laws (lam > 0)
# ----------------------------------------------------------------------

def _require_lam(q: LastPassageQuery):
    if q.lam <= 0.0:
        raise ValueError("this law requires lam > 0 (exponential horizon)")


def last_up_measure(q: LastPassageQuery) -> MeasureValue:
    """Measure over y = X(sigma_plus -) in [0, d) of
    E_x[e^{-L(sigma_plus)}; X(sigma_plus -) in dy, 0 < sigma_plus <= tau]:
    density u(x, y) (lam + nu(y)) plus creeping atom
    (sigma^2/2) phi(lam) u(x, 0) at zero."""
    _require_lam(q)
    mu = mu_measure(q.model, q.lam)
    atom = mu.atom_at_zero * q.u(0.0)

    def density(y):
        if not 0.0 < y < q.corridor.d:
            raise ValueError("density defined on (0, d)")
        return q.u(y) * float(mu.density(y))

    return MeasureValue(density=density, atom_at_zero=atom, support=(0.0, q.corridor.d))


def last_up_jump_density(q: LastPassageQuery, y: float) -> float:
    """Joint restriction of the sigma_plus law to paths leaving the positive
    half-line by a jump: u(x, y) nu(y) on (0, d)."""
    _require_lam(q)
    if not 0.0 < y < q.corridor.d:
        raise ValueError("y must lie in (0, d)")
    return q.u(y) * float(q.model.levy_tail_integral(y, q.lam))


def last_down_density(q: LastPassageQuery, y: float) -> float:
    """Density in y in (c, 0) of E_x[e^{-L(sigma_minus)}; X(sigma_minus) in dy, ...]:
    lam u(x, y).  The complementary creeping part sits at y = 0."""
    _require_lam(q)
    if not q.corridor.c < y < 0.0:
        raise ValueError("y must lie in (c, 0)")
    return q.lam * q.u(y)


def last_down_creep(q: LastPassageQuery) -> float:
    """Creeping part of the sigma_minus law, X(sigma_minus) = 0:
    (lam / phi(lam)) u(x, 0)."""
    _require_lam(q)
    return q.lam / q.phi_lam * q.u(0.0)


def last_hit(q: LastPassageQuery) -> float:
    """E_x[e^{-L(sigma_hit)}; 0 < sigma_hit <= tau] = psi'(phi(lam)) u(x, 0)."""
    _require_lam(q)
    return float(q.model.psi_prime(q.phi_lam)) * q.u(0.0)


def last_totals(q: LastPassageQuery) -> float:
    """Total mass E_x[e^{-L(sigma)}; 0 < sigma <= tau] for the query's kind."""
    _require_lam(q)
    qs = q.quad
    if q.kind == SigmaKind.PLUS:
        mu = mu_measure(q.model, q.lam)
        atom = mu.atom_at_zero * q.u(0.0)

        def integrand(ys):
            return np.array([q.u(float(y)) for y in ys]) * np.asarray(mu.density(ys))

        val = integrate_smooth(integrand, 0.0, q.corridor.d,
                               (q.window.a, q.window.b, q.x), qs)
        return atom + val
    if q.kind == SigmaKind.MINUS:
        def integrand(ys):
            return np.array([q.u(float(y)) for y in ys])

        val = integrate_smooth(integrand, q.corridor.c, 0.0,
                               (q.window.a, q.window.b, q.x), qs)
        return last_down_creep(q) + q.lam * val
    return last_hit(q)


def prob_sigma_zero(model: LevyModel, lam: float, x: float, kind: SigmaKind) -> float:
    """P_x(sigma = 0): the last time is never, i.e. the half-line (or point)
    is not visited during (0, e_lam).  Valid for any real x."""
    if lam <= 0.0:
        raise ValueError("prob_sigma_zero requires lam > 0")
    ph = model.phi(lam)
    if kind == SigmaKind.PLUS:
        return 1.0 - math.exp(ph * x) if x < 0.0 else 0.0
    sc = ScaleEval(model, lam)
    if kind == SigmaKind.MINUS:
        return float(1.0 - sc.Z(x) + lam / ph * sc.W(x))
    return float(1.0 - math.exp(ph * x) + float(model.psi_prime(ph)) * sc.W(x))


def last_infty(model: LevyModel, window: OccupationWindow, corridor: Corridor,
               x: float, kind: SigmaKind,
               quad: Optional[QuadSettings] = None) -> LastInftyValue:
    """Perpetual (lam = 0) analogues E_x[e^{-L(sigma_inf)}; 0 < sigma_inf <= tau].

    Only the kinds that are finite for the model's drift direction carry
    mass: psi'(0+) > 0 keeps sigma_minus (and sigma_hit, which coincides
    with it) finite; psi'(0+) < 0 keeps sigma_plus and sigma_hit finite;
    psi'(0+) = 0 (oscillating) makes all three infinite.  A drift/kind
    mismatch raises; the oscillating case returns value 0 flagged
    ``time_finite=False``.
    """
    qs = quad or QuadSettings()
    drift = model.psi_prime0()
    ker = KernelEval(model, window, qs)
    if drift == 0.0:
        return LastInftyValue(0.0, time_finite=False)
    if drift > 0.0:
        if kind == SigmaKind.PLUS:
            raise ValueError("sigma_plus is a.s. infinite when psi'(0+) > 0")
        u0 = _resolvent_from_kernels(ker, corridor, x, 0.0)
        return LastInftyValue(drift * u0, time_finite=True)
    # drift < 0: X drifts to -inf
    if kind == SigmaKind.MINUS:
        raise ValueError("sigma_minus is a.s. infinite when psi'(0+) < 0")
    ph0 = model.phi(0.0)
    if kind == SigmaKind.ZERO:
        u0 = _resolvent_from_kernels(ker, corridor, x, 0.0)
        return LastInftyValue(float(model.psi_prime(ph0)) * u0, time_finite=True)
    # sigma_plus: atom (sigma^2/2) phi(0) u(x,0) plus density nu_0 on (0, d)
    atom = 0.5 * model.sigma ** 2 * ph0 * _resolvent_from_kernels(ker, corridor, x, 0.0)

    def integrand(ys):
        u_vals = np.array([_resolvent_from_kernels(ker, corridor, x, float(y)) for y in ys])
        return u_vals * np.asarray(model.levy_tail_integral(ys, 0.0))

    val = integrate_smooth(integrand, 0.0, corridor.d, (window.a, window.b, x), qs)
    return LastInftyValue(atom + val, time_finite=True)


# ----------------------------------------------------------------------
# joint laws with the position at e_lam
# ----------------------------------------------------------------------

def joint_laws(q: LastPassageQuery, target: str) -> Callable:
    """Density evaluators for joint laws with the position at e_lam.

    Targets:

    * ``"up_creep"``: density in y > 0 of
      E_x[e^{-L(sigma_plus)}; X(sigma_plus) = 0, -X(e_lam) in dy, ...] =
      lam u(x,0) (sigma^2/2)(W^{(lam)'}(y) - phi(lam) W^{(lam)}(y)).
    * ``"down_creep"``: density in y > 0 of
      E_x[e^{-L(sigma_minus)}; X(sigma_minus) = 0, X(e_lam) in dy, ...] =
      lam u(x,0) e^{-phi(lam) y}.
    * ``"hit"``: density in z (any sign, z != 0) of
      E_x[e^{-L(sigma_hit)}; X(e_lam) in dz, ...] =
      lam u(x,0) (e^{-phi(lam) z} - W^{(lam)}(-z)/phi'(lam)); the factor is
      the transform of hitting z from the endpoint run backwards.
    * ``"difference"``: for a start at 0, density in (x_e, y, z) with
      x_e = -X(e_lam) > 0, y = -X(sigma_plus) > 0 the jump overshoot and
      z = X(sigma_plus -) in (0, d) the pre-jump position, of
      E[e^{L(sigma_hit) - L(sigma_plus)}; ..., 0 < sigma_hit < sigma_plus <= tau],
      equal to lam R^{(lam)}(x_e, y) [kernel ratio] [W^{(lam)} corridor factor]
      pi(z + y) with pi the jump-size intensity.
    """
    _require_lam(q)
    lam, model = q.lam, q.model
    ph = q.phi_lam
    u0 = q.u(0.0)
    sc = q.scale_lam
    if target == "up_creep":
        def density(y: float) -> float:
            if y <= 0.0:
                raise ValueError("y must be positive")
            return lam * u0 * 0.5 * model.sigma ** 2 \
                * float(sc.W_prime(y) - ph * sc.W(y))
        return density
    if target == "down_creep":
        def density(y: float) -> float:
            if y <= 0.0:
                raise ValueError("y must be positive")
            return lam * u0 * math.exp(-ph * y)
        return density
    if target == "hit":
        ppr = model.phi_prime(lam)

        def density(z: float) -> float:
            if z == 0.0:
                raise ValueError("z must be nonzero")
            return lam * u0 * float(math.exp(-ph * z) - sc.W(-z) / ppr)
        return density
    if target == "difference":
        c, d = q.corridor.c, q.corridor.d
        corner = float(sc.W(-c) * sc.W(d) / sc.W(d - c) - sc.W(0.0))
        denom = q.kernels.calW_ab(d, 0.0)

        def density(x_e: float, y: float, z: float) -> float:
            if x_e <= 0.0 or y <= 0.0 or not 0.0 < z < d:
                raise ValueError("requires x_e > 0, y > 0, 0 < z < d")
            if model.jumps is None:
                return 0.0
            if hasattr(model.jumps, "alpha"):
                pi = model.jumps.rate * model.jumps.alpha \
                    * math.exp(-model.jumps.alpha * (z + y))
            else:
                pi = model.jumps.rate * float(model.jumps.density(z + y))
            r = classical_potential_density(model, lam, x_e, y)
            ratio = q.kernels.calW_ab(d, z) / denom
            return lam * r * ratio * corner * pi
        return density
    raise ValueError(f"unknown joint-law target {target!r}")


# ----------------------------------------------------------------------
# equal-rate closed forms (p = q); corridor sent to all of R
# ----------------------------------------------------------------------

_EXAM_P_SWITCH = 1e-6


def example_pq_equal(model: LevyModel, p: float, lam: float, x: float,
                     kind: SigmaKind) -> float:
    """E_x[e^{-p sigma}] with a single clock rate p and exponential horizon
    e_lam, no corridor: closed forms in the scale functions.

    All three reduce to 1 at p = 0; the sigma_plus formula has a removable
    0/0 in its leading coefficient there, so for p below 1e-6 the
    coefficient is replaced by its analytic limit 1.
    """
    if lam <= 0.0:
        raise ValueError("requires lam > 0")
    if p < 0.0:
        raise ValueError("requires p >= 0")
    ph_l = model.phi(lam)
    ph_pl = model.phi(p + lam)
    dpsi_pl = float(model.psi_prime(ph_pl))
    sc_pl = ScaleEval(model, p + lam)
    sc_l = ScaleEval(model, lam)
    if kind == SigmaKind.PLUS:
        if p < _EXAM_P_SWITCH:
            coef = 1.0
        else:
            coef = p * ph_l / ((ph_pl - ph_l) * ph_pl * dpsi_pl)
        z_tilt = float(ScaleEval(model, p).Z_tilted(ph_l, x))
        second = math.exp(ph_l * x) * z_tilt \
            - (p / (p + lam)) * float(sc_pl.Z(x)) - lam / (p + lam)
        return coef * math.exp(ph_pl * x) - second
    if kind == SigmaKind.MINUS:
        lead = (1.0 / dpsi_pl) * math.exp(ph_pl * x) * (lam / ph_l - lam / ph_pl)
        mid = (lam / (p + lam)) * float(sc_pl.Z(x)) - (lam / ph_l) * float(sc_pl.W(x))
        tail = 1.0 - float(sc_l.Z(x)) + (lam / ph_l) * float(sc_l.W(x))
        return lead + mid + tail
    # sigma_hit
    dpsi_l = float(model.psi_prime(ph_l))
    never = 1.0 - math.exp(ph_l * x) + dpsi_l * float(sc_l.W(x))
    tail = dpsi_l * (math.exp(ph_pl * x) / dpsi_pl - float(sc_pl.W(x)))
    return never + tail
