"""q-scale functions W and Z of a spectrally negative Levy process.

W^{(q)} is the unique nonnegative increasing function vanishing on (-inf, 0)
whose Laplace transform is 1/(psi(theta) - q) for theta > phi(q);
Z^{(q)}(x) = 1 + q * int_0^x W^{(q)}.  Exponentially tilted versions
W_c, Z_c are the scale functions of the Esscher-tilted process.

Two interchangeable backends are provided:

* ``"closed"`` — partial fractions over the roots of psi = q (models with no
  jumps or exponential jumps make psi rational), giving
  W^{(q)}(x) = sum_i e^{theta_i x} / psi'(theta_i) plus polynomial terms in
  the critical double-root case.
* ``"inversion"`` — numerical Bromwich inversion of the tilted transform
  1/(psi(s + phi(q)) - q), which is the transform of the bounded function
  e^{-phi(q) x} W^{(q)}(x).
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ._quad import QuadSettings
from .inversion import InversionConfig, euler_inversion
from .models import ExponentialJumps, LevyModel

__all__ = ["ScaleEval", "CLOSED", "INVERSION"]

CLOSED = "closed"
INVERSION = "inversion"

_CRITICAL_TOL = 1e-11  # |psi'(0+)| below this at q=0 means a double root at 0


def _poly_coefficients(model: LevyModel, q: float):
    """Coefficients (highest degree first) of (psi(theta) - q) * (theta + alpha),
    or of psi(theta) - q itself when there are no jumps."""
    s2 = 0.5 * model.sigma ** 2
    d = model.drift
    if model.jumps is None:
        if s2 > 0.0:
            return np.array([s2, d, -q])
        return np.array([d, -q])
    eta, alpha = model.jumps.rate, model.jumps.alpha
    if s2 > 0.0:
        return np.array([s2, s2 * alpha + d, d * alpha - eta - q, -q * alpha])
    return np.array([d, d * alpha - eta - q, -q * alpha])


class ScaleEval:
    """Evaluator for W^{(q)}, W^{(q)'}, Z^{(q)} and their tilted versions.

    Args:
        model: the underlying process.
        q: transform order, >= 0.
        backend: ``"closed"`` or ``"inversion"``.
        inversion: settings for the numeric backend.
        quad: tolerance settings reused by the numeric Z antiderivative.
    """

    def __init__(self, model: LevyModel, q: float, backend: str = CLOSED,
                 inversion: Optional[InversionConfig] = None,
                 quad: Optional[QuadSettings] = None):
        if q < 0.0:
            raise ValueError("scale functions require q >= 0")
        if backend not in (CLOSED, INVERSION):
            raise ValueError(f"unknown backend {backend!r}")
        if backend == CLOSED and model.jumps is not None \
                and not isinstance(model.jumps, ExponentialJumps):
            raise ValueError("closed-form backend requires no jumps or exponential jumps")
        self.model = model
        self.q = float(q)
        self.backend = backend
        self.inversion = inversion or InversionConfig()
        self.quad = quad or QuadSettings()
        self.phi_q = model.phi(q)
        self._tilt_cache: dict[float, "ScaleEval"] = {}
        self._z_spline = None
        self._z_hi = 0.0
        if backend == CLOSED:
            self._terms = self._build_terms()

    # ------------------------------------------------------------------
    # closed-form machinery
    # ------------------------------------------------------------------

    def _build_terms(self):
        """Partial-fraction terms [(theta, poly coeffs c_j)] so that
        W(x) = Re sum_i e^{theta_i x} sum_j c_ij x^j for x > 0."""
        model, q = self.model, self.q
        if q == 0.0 and abs(model.psi_prime0()) < _CRITICAL_TOL:
            return self._critical_terms()
        coeffs = _poly_coefficients(model, q)
        roots = np.roots(coeffs)
        # polish with two complex Newton steps on psi - q
        for _ in range(2):
            dpsi = model.psi_prime(roots)
            ok = np.abs(dpsi) > 1e-30
            roots = np.where(ok, roots - (model.psi(roots) - q) / np.where(ok, dpsi, 1.0), roots)
        return [(complex(th), (1.0 / complex(self.model.psi_prime(th)),)) for th in roots]

    def _critical_terms(self):
        # q = 0 with psi'(0+) = 0: double root at the origin
        model = self.model
        s2 = 0.5 * model.sigma ** 2
        if model.jumps is None:
            # driftless Brownian motion: W(x) = 2 x / sigma^2
            return [(0.0 + 0.0j, (0.0, 1.0 / s2))]
        alpha = model.jumps.alpha
        if s2 == 0.0:
            # critical Cramer–Lundberg: W(x) = (1 + alpha x) / drift
            d = model.drift
            return [(0.0 + 0.0j, (1.0 / d, alpha / d))]
        c3, c2 = s2, s2 * alpha + model.drift
        th3 = -c2 / c3
        c_exp = (th3 + alpha) / (c3 * th3 ** 2)
        return [(0.0 + 0.0j, (-c_exp, alpha / c2)), (complex(th3), (c_exp,))]

    def _eval_terms(self, x, derivative: bool = False):
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape, dtype=complex)
        for theta, cs in self._terms:
            if derivative:
                # d/dx [p(x) e^{theta x}] = (p'(x) + theta p(x)) e^{theta x}
                new = [theta * c for c in cs]
                for j in range(1, len(cs)):
                    new[j - 1] += j * cs[j]
                cs = new
            p = np.zeros(x.shape, dtype=complex)
            for c in reversed(cs):
                p = p * x + c
            total += p * np.exp(theta * x)
        return total.real

    @staticmethod
    def _power_exp_integral(theta: complex, j: int, x):
        """int_0^x y^j e^{theta y} dy, elementwise in x >= 0."""
        x = np.asarray(x, dtype=float)
        if abs(theta) < 1e-300:
            return x ** (j + 1) / (j + 1) + 0.0j
        acc = (np.exp(theta * x) - 1.0) / theta
        for m in range(1, j + 1):
            acc = (x ** m * np.exp(theta * x) - m * acc) / theta
        return acc

    # ------------------------------------------------------------------
    # public evaluation
    # ------------------------------------------------------------------

    def W(self, x):
        """W^{(q)}(x); zero for x < 0, exact boundary value at x = 0."""
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        pos = x > 0.0
        if np.any(pos):
            if self.backend == CLOSED:
                out[pos] = self._eval_terms(x[pos])
            else:
                out[pos] = [self._invert_W(float(v)) for v in x[pos]]
        out[x == 0.0] = self.model.scale_at_zero(self.q)
        return float(out[0]) if scalar else out

    def W_prime(self, x):
        """Right derivative of W^{(q)}; zero for x < 0."""
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        nn = x >= 0.0
        if np.any(nn):
            if self.backend == CLOSED:
                out[nn] = self._eval_terms(x[nn], derivative=True)
            else:
                out[nn] = [self._fd_prime(float(v)) for v in x[nn]]
        return float(out[0]) if scalar else out

    def Z(self, x):
        """Z^{(q)}(x) = 1 + q int_0^x W^{(q)}; identically 1 for x <= 0."""
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.ones_like(x)
        pos = x > 0.0
        if np.any(pos) and self.q != 0.0:
            if self.backend == CLOSED:
                acc = np.zeros(x[pos].shape, dtype=complex)
                for theta, cs in self._terms:
                    for j, c in enumerate(cs):
                        acc += c * self._power_exp_integral(theta, j, x[pos])
                out[pos] = 1.0 + self.q * acc.real
            else:
                out[pos] = [1.0 + self.q * self._z_antideriv(float(v)) for v in x[pos]]
        return float(out[0]) if scalar else out

    def W_tilted(self, c: float, x):
        """W under the Esscher tilt at c: e^{-c x} W^{(q + psi(c))}(x)."""
        shifted = self._shifted(c)
        x = np.asarray(x, dtype=float)
        return np.exp(-c * x) * shifted.W(x)

    def Z_tilted(self, c: float, x):
        """Z_c^{(q)}(x) = 1 + q int_0^x e^{-c y} W^{(q + psi(c))}(y) dy."""
        shifted = self._shifted(c)
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.ones_like(x)
        pos = x > 0.0
        if np.any(pos) and self.q != 0.0:
            if shifted.backend == CLOSED:
                acc = np.zeros(x[pos].shape, dtype=complex)
                for theta, cs in shifted._terms:
                    for j, co in enumerate(cs):
                        acc += co * self._power_exp_integral(theta - c, j, x[pos])
                out[pos] = 1.0 + self.q * acc.real
            else:
                from scipy.integrate import quad
                for i, v in zip(np.nonzero(pos)[0], x[pos]):
                    val = quad(lambda y: math.exp(-c * y) * shifted.W(y), 0.0, float(v),
                               epsrel=self.quad.tol, limit=200)[0]
                    out[i] = 1.0 + self.q * val
        return float(out[0]) if scalar else out

    def integral_exp_weighted(self, v: float, x: float) -> float:
        """int_0^x e^{-v y} W^{(q)}(y) dy (the building block of tilted Z
        functions taken at arbitrary, possibly negative, order q - psi(v))."""
        if x <= 0.0:
            return 0.0
        if self.backend == CLOSED:
            acc = 0.0j
            for theta, cs in self._terms:
                for j, co in enumerate(cs):
                    acc += co * self._power_exp_integral(theta - v, j, x)
            return float(acc.real)
        from scipy.integrate import quad
        return quad(lambda y: math.exp(-v * y) * self.W(y), 0.0, float(x),
                    epsrel=self.quad.tol, limit=200)[0]

    def _shifted(self, c: float) -> "ScaleEval":
        if c < 0.0 and self.model.jumps is not None and c <= -self.model.jumps.alpha:
            raise ValueError("tilt c must exceed -alpha for exponential jumps")
        key = float(c)
        if key not in self._tilt_cache:
            q_shift = self.q + float(self.model.psi(c))
            if q_shift < -1e-12:
                raise ValueError("tilt requires q + psi(c) >= 0")
            self._tilt_cache[key] = ScaleEval(self.model, max(q_shift, 0.0), self.backend,
                                              self.inversion, self.quad)
        return self._tilt_cache[key]

    # ------------------------------------------------------------------
    # numeric-inversion backend internals
    # ------------------------------------------------------------------

    def _invert_W(self, x: float) -> float:
        ph, q = self.phi_q, self.q
        tilted = euler_inversion(lambda s: 1.0 / (self.model.psi(s + ph) - q),
                                 x, self.inversion)
        return math.exp(ph * x) * tilted

    def _fd_prime(self, x: float) -> float:
        h = 1e-5 * max(1.0, abs(x))
        if x <= 0.0:
            return (self._invert_W(x + h) - self.model.scale_at_zero(self.q)) / h \
                if x == 0.0 else 0.0
        h = min(h, 0.5 * x) if x < 2e-5 else h
        lo = self.W(x - h) if x - h > 0.0 else self.model.scale_at_zero(self.q)
        return (self._invert_W(x + h) - lo) / (2.0 * h)

    def _z_antideriv(self, x: float) -> float:
        """int_0^x W via a cached cubic-spline antiderivative on a fine grid."""
        if self._z_spline is None or x > self._z_hi:
            hi = max(1.0, 1.25 * x)
            grid = np.arange(0.0, hi + 1e-3, 1e-3)
            vals = np.array([self.W(float(g)) for g in grid])
            self._z_spline = CubicSpline(grid, vals).antiderivative()
            self._z_hi = hi
        return float(self._z_spline(x))
