"""Spectrally negative Levy process models.

A process is specified by a Gaussian coefficient ``sigma``, a natural linear
drift (the slope of the path between jumps), and an optional downward
compound-Poisson jump component.  The Laplace exponent is

    psi(theta) = sigma^2 theta^2 / 2 + drift * theta + rate * (E[e^{-theta J}] - 1),

which is finite for all theta >= 0 because there are no positive jumps.
Processes that are negatives of subordinators (no Gaussian part and
non-positive drift) are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

__all__ = [
    "ExponentialJumps",
    "GenericJumps",
    "LevyModel",
]

_PHI_ATOL = 1e-13  # absolute tolerance (scaled by max(1, q)) for psi(phi(q)) = q


@dataclass(frozen=True)
class ExponentialJumps:
    """Compound-Poisson downward jumps with Exp(alpha) sizes at rate ``rate``."""

    rate: float
    alpha: float

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError("jump rate must be positive")
        if self.alpha <= 0.0:
            raise ValueError("jump size parameter alpha must be positive")

    def mgf(self, theta):
        # E[e^{-theta J}] for J ~ Exp(alpha), finite for theta > -alpha.
        # Only scalar real input is domain-checked: internal root handling
        # evaluates the rational continuation across the pole on arrays.
        if isinstance(theta, (int, float)) and theta <= -self.alpha:
            raise ValueError("mgf requires theta > -alpha")
        return self.alpha / (self.alpha + theta)

    def mgf_prime(self, theta):
        return -self.alpha / (self.alpha + theta) ** 2

    def mgf_double_prime(self, theta):
        return 2.0 * self.alpha / (self.alpha + theta) ** 3

    def mean_truncated(self) -> float:
        # E[J 1{J <= 1}], the compensator correction for the cutoff form.
        a = self.alpha
        return (1.0 - math.exp(-a) * (1.0 + a)) / a

    def density(self, z):
        return self.alpha * np.exp(-self.alpha * np.asarray(z, dtype=float))

    def tail(self, y):
        """Integral of the Levy measure over (y, infinity), divided by rate."""
        return np.exp(-self.alpha * np.asarray(y, dtype=float))

    def sample(self, rng: np.random.Generator, size: int):
        return rng.exponential(1.0 / self.alpha, size=size)


@dataclass(frozen=True)
class GenericJumps:
    """Compound-Poisson downward jumps with a user-supplied size distribution.

    Args:
        rate: Poisson arrival rate of jumps.
        density: probability density of the jump size on (0, inf).
        sampler: ``sampler(rng, size) -> ndarray`` drawing jump sizes.
        tail: optional closed-form survival function of the size density;
            when absent, tails are integrated numerically.
    """

    rate: float
    density: Callable[[float], float]
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    tail: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError("jump rate must be positive")

    def mgf(self, theta):
        if np.iscomplexobj(theta) or isinstance(theta, complex):
            re = integrate.quad(
                lambda z: math.exp(-theta.real * z) * math.cos(theta.imag * z) * self.density(z),
                0.0, np.inf)[0]
            im = integrate.quad(
                lambda z: -math.exp(-theta.real * z) * math.sin(theta.imag * z) * self.density(z),
                0.0, np.inf)[0]
            return re + 1j * im
        t = float(theta)
        return integrate.quad(lambda z: math.exp(-t * z) * self.density(z), 0.0, np.inf)[0]

    def mgf_prime(self, theta):
        t = float(theta)
        return -integrate.quad(lambda z: z * math.exp(-t * z) * self.density(z), 0.0, np.inf)[0]

    def mgf_double_prime(self, theta):
        t = float(theta)
        return integrate.quad(lambda z: z * z * math.exp(-t * z) * self.density(z), 0.0, np.inf)[0]

    def mean_truncated(self) -> float:
        return integrate.quad(lambda z: z * self.density(z), 0.0, 1.0)[0]

    def sample(self, rng: np.random.Generator, size: int):
        return np.asarray(self.sampler(rng, size), dtype=float)


JumpSpec = Union[ExponentialJumps, GenericJumps]


@dataclass(frozen=True)
class LevyModel:
    """Spectrally negative Levy process without positive jumps.

    Args:
        sigma: Gaussian coefficient, >= 0.
        drift: natural linear drift of the path between jumps.  This is the
            drift a simulator applies directly; the Levy–Khintchine
            coefficient with the unit-cutoff compensator is available as
            :attr:`gamma`.
        jumps: optional compound-Poisson downward jump component.

    Raises:
        ValueError: if ``sigma < 0`` or the process would be the negative of
            a subordinator (``sigma == 0`` and ``drift <= 0``).
    """

    sigma: float
    drift: float
    jumps: Optional[JumpSpec] = None

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if self.sigma == 0.0 and self.drift <= 0.0:
            raise ValueError(
                "model excluded: sigma == 0 requires positive drift "
                "(process must not be the negative of a subordinator)")

    # ------------------------------------------------------------------
    # Laplace exponent and derivatives
    # ------------------------------------------------------------------

    def psi(self, theta):
        """Laplace exponent; accepts scalars or arrays, real or complex."""
        theta = np.asarray(theta)
        out = 0.5 * self.sigma ** 2 * theta * theta + self.drift * theta
        if self.jumps is not None:
            out = out + self.jumps.rate * (self.jumps.mgf(theta) - 1.0)
        return out if out.ndim else out[()]

    def psi_prime(self, theta):
        theta = np.asarray(theta)
        out = self.sigma ** 2 * theta + self.drift
        if self.jumps is not None:
            out = out + self.jumps.rate * self.jumps.mgf_prime(theta)
        return out if out.ndim else out[()]

    def psi_double_prime(self, theta):
        theta = np.asarray(theta)
        out = np.full(theta.shape, self.sigma ** 2, dtype=float)
        if self.jumps is not None:
            out = out + self.jumps.rate * self.jumps.mgf_double_prime(theta)
        return out if out.ndim else out[()]

    def psi_prime0(self) -> float:
        """Right derivative psi'(0+) = E[X_1]; sign decides long-run drift."""
        return float(self.psi_prime(0.0))

    @property
    def gamma(self) -> float:
        """Levy–Khintchine linear coefficient for the unit-cutoff compensator."""
        if self.jumps is None:
            return self.drift
        return self.drift - self.jumps.rate * self.jumps.mean_truncated()

    @property
    def is_bounded_variation(self) -> bool:
        return self.sigma == 0.0

    def scale_at_zero(self, q: float = 0.0) -> float:
        """W(0+): zero for unbounded variation, 1/drift otherwise (any q)."""
        return 0.0 if self.sigma > 0.0 else 1.0 / self.drift

    # ------------------------------------------------------------------
    # Right inverse of psi
    # ------------------------------------------------------------------

    def phi(self, q: float) -> float:
        """Largest solution of psi(theta) = q on [0, inf).

        For q > 0 the root is unique and positive; phi(0) is 0 when
        psi'(0+) >= 0 and the positive root otherwise.  Bracketed Newton
        with bisection safeguarding; terminates when
        |psi(phi) - q| <= 1e-13 * max(1, q).
        """
        if q < 0.0:
            raise ValueError("phi(q) requires q >= 0")
        if q == 0.0 and self.psi_prime0() >= 0.0:
            return 0.0

        rate = self.jumps.rate if self.jumps is not None else 0.0
        # psi(t) >= sigma^2 t^2/2 + drift*t - rate, so the BM-style root of
        # psi_quadratic = q + rate brackets phi(q) from above.
        if self.sigma > 0.0:
            hi = (-self.drift + math.sqrt(self.drift ** 2
                                          + 2.0 * self.sigma ** 2 * (q + rate))) / self.sigma ** 2
        else:
            hi = (q + rate) / self.drift
        hi = max(hi * 1.0000001, 1e-12)
        lo = 0.0  # psi(0) = 0 <= q, strict for q > 0

        tol = _PHI_ATOL * max(1.0, abs(q))
        t = hi
        for _ in range(200):
            f = float(self.psi(t)) - q
            if abs(f) <= tol:
                return t
            if f > 0.0:
                hi = t
            else:
                lo = t
            df = float(self.psi_prime(t))
            step_ok = df > 0.0
            if step_ok:
                t_new = t - f / df
                step_ok = lo < t_new < hi
            if not step_ok:
                t_new = 0.5 * (lo + hi)
            if t_new == t:
                return t
            t = t_new
        return t

    def phi_prime(self, q: float) -> float:
        """Derivative of phi; equals 1 / psi'(phi(q)) when psi'(phi(q)) > 0."""
        d = float(self.psi_prime(self.phi(q)))
        if d <= 0.0:
            raise ValueError("phi'(q) undefined: psi'(phi(q)) <= 0 (critical case)")
        return 1.0 / d

    # ------------------------------------------------------------------
    # Discounted tail integral of the Levy measure
    # ------------------------------------------------------------------

    def levy_tail_integral(self, y, lam: float):
        """Integral of (1 - e^{phi(lam)(y - z)}) over the Levy measure on z > y.

        This is the density (in y > 0) of the difference between the
        last-passage intensity measure and lam * Lebesgue.  Closed form for
        exponential jumps: rate * e^{-alpha y} * phi / (alpha + phi); zero
        when there are no jumps or when phi(lam) = 0.
        """
        if np.any(np.asarray(y) <= 0.0):
            raise ValueError("levy_tail_integral requires y > 0")
        if lam < 0.0:
            raise ValueError("levy_tail_integral requires lam >= 0")
        if self.jumps is None:
            return np.zeros_like(np.asarray(y, dtype=float))[()] if np.ndim(y) else 0.0
        ph = self.phi(lam)
        if isinstance(self.jumps, ExponentialJumps):
            a = self.jumps.alpha
            out = self.jumps.rate * np.exp(-a * np.asarray(y, dtype=float)) * ph / (a + ph)
            return out if np.ndim(y) else float(out)
        # generic jumps: adaptive quadrature of the defining integrand
        def one(yv: float) -> float:
            val = integrate.quad(
                lambda z: (1.0 - math.exp(ph * (yv - z))) * self.jumps.density(z),
                yv, np.inf)[0]
            return self.jumps.rate * val
        if np.ndim(y):
            return np.array([one(float(v)) for v in np.asarray(y).ravel()]).reshape(np.shape(y))
        return one(float(y))
