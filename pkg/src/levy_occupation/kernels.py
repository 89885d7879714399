"""Two-rate occupation kernels for a window (a, b).

The occupation clock L(t) accrues at rate ``p`` while the path is outside
(a, b) and at rate ``q`` inside.  Exit and resolvent identities for the
clock-discounted process are expressed through kernels that blend the
one-rate scale functions W^{(p)} and W^{(q)}:

    calW_a(x, y)  = W^{(p)}(x-y) + (q-p) int_a^x W^{(q)}(x-z) W^{(p)}(z-y) dz
    calW_ab(x, y) = W^{(p)}(x-y) + (q-p) int_a^b W^{(p)}(x-z) calW_a(z, y) dz
    calH_a(x)     = e^{phi(p) x} + (q-p) int_a^x W^{(q)}(x-z) e^{phi(p) z} dz
    calH_ab(x)    = e^{phi(p) x} + (q-p) int_a^b W^{(p)}(x-z) calH_a(z) dz

All four collapse to their single-rate forms when p = q.  Quadrature is
composite Gauss–Legendre with panels split at the kink points of the
integrands; the inner kernels are cached as piecewise Chebyshev
interpolants over [a, b] per fixed second argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._quad import QuadSettings, integrate_smooth, panel_nodes
from .inversion import InversionConfig
from .models import LevyModel
from .scale import CLOSED, ScaleEval

__all__ = ["OccupationWindow", "KernelEval"]

_CHEB_DEGREE = 48


@dataclass(frozen=True)
class OccupationWindow:
    """Occupation-rate window: rate p outside (a, b), rate q_in inside."""

    p: float
    q_in: float
    a: float
    b: float

    def __post_init__(self):
        if self.p < 0.0 or self.q_in < 0.0:
            raise ValueError("occupation rates must be nonnegative")
        if self.a > self.b:
            raise ValueError("window requires a <= b")

    @property
    def degenerate(self) -> bool:
        return self.a == self.b or self.p == self.q_in

    def shifted(self, lam: float) -> "OccupationWindow":
        """Window with both rates raised by lam (exponential killing folded in)."""
        return OccupationWindow(self.p + lam, self.q_in + lam, self.a, self.b)


class KernelEval:
    """Evaluator for the occupation kernels of one model and window."""

    def __init__(self, model: LevyModel, window: OccupationWindow,
                 quad: Optional[QuadSettings] = None, backend: str = CLOSED,
                 inversion: Optional[InversionConfig] = None):
        self.model = model
        self.window = window
        self.quad = quad or QuadSettings()
        self.Wp = ScaleEval(model, window.p, backend, inversion, self.quad)
        self.Wq = ScaleEval(model, window.q_in, backend, inversion, self.quad)
        self.phi_p = model.phi(window.p)
        self._collapse = window.p == window.q_in or window.a == window.b
        self._wa_cache: dict[float, tuple] = {}
        self._ha_cheb = None

    # ------------------------------------------------------------------
    # single-window kernels (barrier at a only)
    # ------------------------------------------------------------------

    def calW_a(self, x: float, y: float) -> float:
        """calW_a(x, y); vanishes for x < y.

        Note the half-line kernels do not degenerate when a == b; only the
        window kernels calW_ab / calH_ab do.
        """
        w = self.window
        if x < y:
            return 0.0
        base = self.Wp.W(x - y)
        if w.p == w.q_in:
            return float(base)
        lo = max(w.a, y)
        if x <= lo:
            return float(base)
        val = integrate_smooth(lambda z: self.Wq.W(x - z) * self.Wp.W(z - y),
                               lo, x, (), self.quad)
        return float(base + (w.q_in - w.p) * val)

    def calH_a(self, x: float) -> float:
        return self._calH_from(self.window.a, x)

    def calH_origin(self, x: float) -> float:
        """The a = 0 kernel; satisfies calH_a(x) = e^{phi(p) a} calH_origin(x - a)."""
        return self._calH_from(0.0, x)

    def _calH_from(self, lower: float, x: float) -> float:
        w = self.window
        base = math.exp(self.phi_p * x)
        if w.p == w.q_in or x <= lower:
            return base
        val = integrate_smooth(lambda z: self.Wq.W(x - z) * np.exp(self.phi_p * z),
                               lower, x, (), self.quad)
        return base + (w.q_in - w.p) * val

    # ------------------------------------------------------------------
    # double-window kernels (integral over (a, b))
    # ------------------------------------------------------------------

    def calW_ab(self, x: float, y: float) -> float:
        w = self.window
        base = self.Wp.W(x - y)
        if self._collapse:
            return float(base)
        hi = min(w.b, x)
        if hi <= w.a:
            return float(base)
        interp = self._wa_interpolant(y)
        val = integrate_smooth(lambda z: self.Wp.W(x - z) * interp(z),
                               w.a, hi, (y,), self.quad)
        return float(base + (w.q_in - w.p) * val)

    def calH_ab(self, x: float) -> float:
        w = self.window
        base = math.exp(self.phi_p * x)
        if self._collapse:
            return base
        hi = min(w.b, x)
        if hi <= w.a:
            return base
        interp = self._ha_interpolant()
        val = integrate_smooth(lambda z: self.Wp.W(x - z) * interp(z),
                               w.a, hi, (), self.quad)
        return base + (w.q_in - w.p) * val

    # alternative representations; must agree with the primary ones
    def calW_ab_alt(self, x: float, y: float) -> float:
        """Subtraction form: calW_a(x, y) - (q-p) int_b^x W^{(p)}(x-z) calW_a(z, y) dz."""
        w = self.window
        base = self.calW_a(x, y)
        if w.p == w.q_in or x <= w.b:
            return float(base)
        val = integrate_smooth(
            lambda z: self.Wp.W(x - z) * np.array([self.calW_a(zz, y) for zz in z]),
            w.b, x, (y,), self.quad)
        return float(base - (w.q_in - w.p) * val)

    def calH_ab_alt(self, x: float) -> float:
        """Subtraction form: calH_a(x) - (q-p) int_b^x W^{(p)}(x-z) calH_a(z) dz."""
        w = self.window
        base = self.calH_a(x)
        if w.p == w.q_in or x <= w.b:
            return base
        val = integrate_smooth(
            lambda z: self.Wp.W(x - z) * np.array([self.calH_a(zz) for zz in z]),
            w.b, x, (), self.quad)
        return base - (w.q_in - w.p) * val

    # ------------------------------------------------------------------
    # Chebyshev caches over [a, b]
    # ------------------------------------------------------------------

    def _wa_interpolant(self, y: float):
        key = float(y)
        hit = self._wa_cache.get(key)
        if hit is None:
            if len(self._wa_cache) > 256:
                self._wa_cache.clear()
            hit = self._fit(lambda z: self.calW_a(z, y), zero_below=y)
            self._wa_cache[key] = hit
        return hit

    def _ha_interpolant(self):
        if self._ha_cheb is None:
            self._ha_cheb = self._fit(self.calH_a, zero_below=None)
        return self._ha_cheb

    def _fit(self, f, zero_below):
        """Chebyshev fit of a scalar function on [a, b].  The calW_a kernels
        vanish identically below their second argument, so the fit covers
        only [max(a, zero_below), b] and the evaluator returns 0 below it."""
        a, b = self.window.a, self.window.b
        lo = a if zero_below is None else max(a, zero_below)
        if lo >= b:
            return lambda z: np.zeros_like(np.atleast_1d(np.asarray(z, dtype=float)))
        cheb = np.polynomial.Chebyshev.interpolate(
            lambda z: np.array([f(float(v)) for v in np.atleast_1d(z)]),
            _CHEB_DEGREE, domain=[lo, b])

        def evaluate(z):
            z = np.atleast_1d(np.asarray(z, dtype=float))
            return np.where(z >= lo, cheb(np.clip(z, lo, b)), 0.0)

        return evaluate
