"""Weierstrass-type special functions on the period lattice (2*ell, 2i*delta).

The basic objects are the 2ell-periodic Weierstrass function

    wp1(x) = sum_n (pi/2ell)^2 / sin^2(pi (x - 2in delta) / 2ell),

its primitive-with-a-sign, the zeta-type function

    zeta1(x) = lim_M sum_{|m|<=M} (pi/2ell) cot(pi (x - 2im delta) / 2ell),

so that wp1 = -d/dx zeta1, the shifted real-valued combination
wp1(x + i delta), and two scalar constants (an additive energy constant
and the Euler-type product over the nome).

All series are summed symmetrically in the image index with an
a-posteriori geometric tail bound in the nome p = exp(-2 pi delta / ell);
summands decay like p^|n|.  Conditional convergence of the zeta1 sum is
handled by always adding the +m and -m images together.

Evaluation is vectorized over numpy arrays of (complex) positions.
Points within EXCLUSION_FACTOR * min(ell, delta) of a lattice point
raise PoleProximity rather than returning a large float: downstream
principal-value quadrature must control singularities explicitly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, PoleProximity

#: Relative exclusion radius around period-lattice points.
EXCLUSION_FACTOR = 1e-8


@dataclass(frozen=True)
class EllipticParams:
    """Half-periods (ell, i*delta); the circle circumference is 2*ell."""

    ell: float
    delta: float

    def __post_init__(self):
        if not (self.ell > 0 and self.delta > 0):
            raise ValueError("ell and delta must be positive")

    @property
    def nome(self):
        """p = exp(-2 pi delta / ell), strictly in (0, 1)."""
        return float(np.exp(-2.0 * np.pi * self.delta / self.ell))


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for the image sums."""

    rel_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


def _lattice_distance(x, params):
    """Distance from x to the nearest point of {2a*ell + 2b*i*delta}."""
    z = np.asarray(x, dtype=complex)
    rx = np.mod(z.real + params.ell, 2.0 * params.ell) - params.ell
    ry = np.mod(z.imag + params.delta, 2.0 * params.delta) - params.delta
    return np.hypot(rx, ry)


def _check_off_lattice(x, params):
    radius = EXCLUSION_FACTOR * min(params.ell, params.delta)
    dist = _lattice_distance(x, params)
    if np.any(dist < radius):
        raise PoleProximity(
            f"evaluation point within {radius:.3e} of a period-lattice point"
        )


def wp1(x, params, ctl=DEFAULT_CONTROL):
    """2ell-periodic Weierstrass-type function, image sum over 2i*delta shifts.

    Accepts scalar or array x (real or complex); returns complex values.
    For real x the imaginary part is spurious rounding, below
    1e-12 * |value|.
    """
    _check_off_lattice(x, params)
    z = np.asarray(x, dtype=complex)
    scale = np.pi / (2.0 * params.ell)
    shift = 2.0j * params.delta
    p = params.nome

    with np.errstate(over="ignore"):
        total = scale**2 / np.sin(scale * z) ** 2
        for n in range(1, ctl.max_terms + 1):
            pair = (
                scale**2 / np.sin(scale * (z - n * shift)) ** 2
                + scale**2 / np.sin(scale * (z + n * shift)) ** 2
            )
            total = total + pair
            ref = np.max(np.abs(total))
            # geometric tail: remaining images are bounded by pair * p/(1-p)
            tail = np.max(np.abs(pair)) * p / (1.0 - p)
            if tail <= ctl.rel_tol * ref:
                break
        else:
            raise NonConvergence("wp1 image sum exhausted max_terms")
    if np.isscalar(x) or np.ndim(x) == 0:
        return complex(total)
    return total


def wp1_prime(x, params, ctl=DEFAULT_CONTROL):
    """Derivative d/dx wp1(x); odd, with third-order poles on the lattice."""
    _check_off_lattice(x, params)
    z = np.asarray(x, dtype=complex)
    scale = np.pi / (2.0 * params.ell)
    shift = 2.0j * params.delta
    p = params.nome

    def term(w):
        return -2.0 * scale**3 * np.cos(scale * w) / np.sin(scale * w) ** 3

    with np.errstate(over="ignore"):
        total = term(z)
        for n in range(1, ctl.max_terms + 1):
            pair = term(z - n * shift) + term(z + n * shift)
            total = total + pair
            ref = np.max(np.abs(total))
            tail = np.max(np.abs(pair)) * p / (1.0 - p)
            if tail <= ctl.rel_tol * max(ref, scale**3):
                break
        else:
            raise NonConvergence("wp1_prime image sum exhausted max_terms")
    if np.isscalar(x) or np.ndim(x) == 0:
        return complex(total)
    return total


def zeta1(x, params, ctl=DEFAULT_CONTROL):
    """Zeta-type function with -d/dx zeta1 = wp1; odd in x.

    The conditionally convergent image sum is taken in the symmetric
    limit: the +m and -m images are always added together.
    """
    _check_off_lattice(x, params)
    z = np.asarray(x, dtype=complex)
    scale = np.pi / (2.0 * params.ell)
    shift = 2.0j * params.delta
    p = params.nome

    with np.errstate(over="ignore"):
        total = scale / np.tan(scale * z)
        for m in range(1, ctl.max_terms + 1):
            pair = scale / np.tan(scale * (z - m * shift)) + scale / np.tan(
                scale * (z + m * shift)
            )
            total = total + pair
            ref = np.max(np.abs(total))
            tail = (np.max(np.abs(pair)) + 4.0 * scale * p**m) * p / (1.0 - p)
            if tail <= ctl.rel_tol * max(ref, scale):
                break
        else:
            raise NonConvergence("zeta1 image sum exhausted max_terms")
    if np.isscalar(x) or np.ndim(x) == 0:
        return complex(total)
    return total


def wp1_shifted(x, params, ctl=DEFAULT_CONTROL):
    """Real-valued wp1(x + i delta) for real x; the shifted line is pole-free.

    The lattice is reflection-symmetric about the line Im = delta, so the
    value is real up to rounding; this is asserted, not assumed.
    """
    xr = np.asarray(x, dtype=float)
    val = wp1(xr + 1.0j * params.delta, params, ctl)
    val = np.asarray(val)
    bound = 1e-10 * (np.pi / (2.0 * params.delta)) ** 2
    if np.max(np.abs(val.imag)) >= bound:
        raise AssertionError("wp1(x + i delta) is not real within tolerance")
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(val.real)
    return val.real


def hyperbolic_limit(x, params, shifted=False, n_images=3):
    """Large-ell degeneration of wp1 (or of wp1_shifted when shifted=True).

    The image sum defining wp1 runs over shifts in the imaginary
    direction; resumming it as a 2ell-periodization of the sinh^-2
    (resp. -cosh^-2) profile is a conditionally convergent reordering
    and picks up the exact constant pi / (2 ell delta).  With that
    constant included the agreement is limited only by the neglected
    periodization images, O(exp(-2 pi (ell - |x|) / delta)).
    """
    xr = np.asarray(x, dtype=float)
    scale = np.pi / (2.0 * params.delta)
    total = np.pi / (2.0 * params.ell * params.delta) * np.ones_like(xr)
    for a in range(-n_images, n_images + 1):
        arg = scale * (xr - 2.0 * a * params.ell)
        if shifted:
            total = total - scale**2 / np.cosh(arg) ** 2
        else:
            total = total + scale**2 / np.sinh(arg) ** 2
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(total)
    return total


def trigonometric_limit(x, params):
    """Large-delta degeneration of wp1: the bare (pi/2ell)^2 / sin^2 profile."""
    scale = np.pi / (2.0 * params.ell)
    return scale**2 / np.sin(scale * np.asarray(x, dtype=float)) ** 2


def c_const(N, g, params, ctl=DEFAULT_CONTROL):
    """Additive constant N g^2 (pi/2ell)^2 (1/3 - (1/8) S) / 2.

    S = sum_{n>=1} n p^n / (1 - p^n); linear in N, quadratic in g.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if N == 0:
        return 0.0
    p = params.nome
    s = 0.0
    for n in range(1, ctl.max_terms + 1):
        term = n * p**n / (1.0 - p**n)
        s += term
        # n p^n is eventually decreasing; crude geometric tail bound
        if term * p / (1.0 - p) * (1.0 + 1.0 / n) <= ctl.rel_tol * max(s, 1e-300):
            break
    else:
        raise NonConvergence("c_const series exhausted max_terms")
    return N * g**2 * (np.pi / (2.0 * params.ell)) ** 2 * (1.0 / 3.0 - s / 8.0) / 2.0


def g_const(params, ctl=DEFAULT_CONTROL):
    """Euler-type product prod_{m>=1} (1 - p^m), in (0, 1]."""
    p = params.nome
    log_total = 0.0
    for m in range(1, ctl.max_terms + 1):
        log_total += np.log1p(-(p**m))
        # |log(1-p^k)| <= p^k/(1-p) for the remaining factors
        if p ** (m + 1) / (1.0 - p) ** 2 <= ctl.rel_tol:
            break
    else:
        raise NonConvergence("g_const product exhausted max_terms")
    return float(np.exp(log_total))
