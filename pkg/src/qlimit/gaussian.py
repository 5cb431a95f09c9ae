"""Jacobi theta function and discrete Gaussian states.

theta3(z, tau) = sum_a exp(1j*pi*tau*a^2) * exp(2j*pi*a*z), Im(tau) > 0.

The equilibrium-market state on the lattice is the wrapped Gaussian

    gamma_kappa(n) = sum_m exp(-(kappa*pi/d) * (m*d + n)^2),

a discrete bell curve of width parameter kappa > 0, equal to
(kappa*d)**-0.5 * theta3(n/d, 1j/(kappa*d)). Its normalization
upsilon_kappa is self-dual under the centered DFT at kappa = 1, and in
general maps to upsilon_{1/kappa}.

gamma_kappa sums real positive terms directly (no complex arithmetic),
truncating when the next wrap term drops below 1e-18 of the running
maximum; theta3 is evaluated fresh per call since it only backs
cross-checks and state construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice, StateVector

#: gamma_kappa truncation: stop adding wrap terms once they fall below
#: this fraction of the largest amplitude so far.
_GAMMA_RELATIVE_TAIL = 1e-18


@dataclass(frozen=True)
class GaussianParams:
    """Width parameter of the discrete Gaussian; kappa in (0, inf)."""

    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ValueError(f"kappa must be strictly positive, got {self.kappa}")


@dataclass(frozen=True)
class ThetaArgs:
    """Arguments of theta3; the series converges only for Im(tau) > 0."""

    z: complex
    tau: complex

    def __post_init__(self) -> None:
        if not complex(self.tau).imag > 0:
            raise ValueError(f"Im(tau) must be > 0, got tau={self.tau}")


def theta3(args: ThetaArgs, tol: float = 1e-12) -> complex:
    """Partial sum of the theta series, accurate to tol relative to the total.

    Terms with index a and -a are paired; |term_a| <= 2*exp(-pi*Im(tau)*a^2
    + 2*pi*|Im(z)|*a), so once past the peak of that bound the tail is
    dominated by a geometric series and summation stops as soon as the
    bound times its geometric tail factor is below tolerance.
    """
    if not 0 < tol <= 1e-6:
        raise ValueError(f"tol must be in (0, 1e-6], got {tol}")
    z = complex(args.z)
    tau = complex(args.tau)
    im_tau = tau.imag
    im_z = abs(z.imag)

    total = 1.0 + 0j
    a = 1
    while True:
        quad = np.exp(1j * math.pi * tau * a * a)
        total += quad * (np.exp(2j * math.pi * a * z) + np.exp(-2j * math.pi * a * z))
        # bound on the next pair of terms, and the ratio of consecutive bounds
        bound = 2.0 * math.exp(-math.pi * im_tau * (a + 1) ** 2 + 2.0 * math.pi * im_z * (a + 1))
        ratio = math.exp(-math.pi * im_tau * (2 * a + 3) + 2.0 * math.pi * im_z)
        if ratio < 1.0 and bound / (1.0 - ratio) <= tol * max(abs(total), 1e-300):
            return complex(total)
        a += 1


def gamma_kappa(lattice: Lattice, params: GaussianParams) -> StateVector:
    """Wrapped Gaussian gamma(n) = sum_m exp(-(kappa*pi/d)(m*d+n)^2); real, even, positive."""
    d = lattice.d
    n = lattice.points().astype(float)
    c = params.kappa * math.pi / d
    total = np.exp(-c * n * n)
    m = 1
    while True:
        wrap = np.exp(-c * (m * d + n) ** 2) + np.exp(-c * (m * d - n) ** 2)
        total += wrap
        if wrap.max() < _GAMMA_RELATIVE_TAIL * total.max():
            break
        m += 1
    return StateVector(lattice, total)


def upsilon_kappa(lattice: Lattice, params: GaussianParams) -> StateVector:
    """The unit-norm discrete Gaussian gamma_kappa / ||gamma_kappa||."""
    g = gamma_kappa(lattice, params)
    return StateVector(lattice, g.amplitudes / g.norm())
