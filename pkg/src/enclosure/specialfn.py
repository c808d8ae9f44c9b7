"""Special functions for the indicator formulas.

Mittag-Leffler function (full, truncated, and log-safe), the
regularization schedule for noisy moment data, modified spherical Bessel
pairs, the needle potential built from the Mittag-Leffler kernel, and
the harmonic-to-Helmholtz transform.

Evaluation strategy for E_alpha(z), 0 < alpha < 1
-------------------------------------------------
The natural size variable is w = |z|^(1/alpha):

    power series     while the largest term stays small enough that
                     double-precision cancellation is below 1e-12
                     (w <= 12 and |z| <= 10; the nominal |z| = 10 switch
                     point is narrowed by cross-validating branches,
                     because for alpha < 1/2 the series loses all digits
                     well before |z| = 10),
    wedge contour    1 < w < 23: numerical Hankel-type contour collapsed
                     onto two rays arg(zeta) = +-psi, with psi chosen to
                     keep the pole zeta = z^(1/alpha) away from the rays,
                     plus the explicit residue exp(z^(1/alpha))/alpha
                     when the pole lies inside the wedge,
    asymptotics      w >= 23: algebraic series -sum z^-k/Gamma(1-alpha k)
                     plus the residue term in the growth sector.

alpha = 1 is exp; alpha = 1/2 goes through the Faddeeva function.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import gamma as _gamma
from scipy.special import j1 as _besselj1
from scipy.special import rgamma as _rgamma
from scipy.special import wofz as _wofz
from scipy.optimize import brentq

from .config import QUAD_ABS_TOL, QUAD_REL_TOL
from .geometry import Disc

__all__ = [
    "PrecisionLossError",
    "MLParams",
    "RegularizationConstants",
    "NeedleFrame",
    "mittag_leffler",
    "mittag_leffler_log",
    "ml_truncated",
    "beta0_root",
    "regularization_constants",
    "BesselTable",
    "modified_spherical_bessel",
    "yarmukhamedov_needle",
    "yarmukhamedov_axis_value",
    "yarmukhamedov_tip_gradient",
    "vekua_transform",
]


class PrecisionLossError(ArithmeticError):
    """Raised when an evaluation cannot meet its accuracy target.

    Carries ``attained`` (the error bound actually reached) when known.
    """

    def __init__(self, message: str, attained: Optional[float] = None):
        super().__init__(message)
        self.attained = attained


# ---------------------------------------------------------------------------
# Mittag-Leffler
# ---------------------------------------------------------------------------
_SERIES_W_MAX = 12.0
_SERIES_ABS_MAX = 10.0
_ASYMP_W_MIN = 23.0


@dataclass(frozen=True)
class MLParams:
    """Order parameter; the truncated variant exists only for alpha = 1/n."""

    alpha: float
    n: Optional[int] = None
    N: Optional[int] = None

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.n is not None:
            if self.n < 2 or abs(self.alpha - 1.0 / self.n) > 1e-12:
                raise ValueError("truncation requires alpha = 1/n with n >= 2")
            if self.N is None or self.N < 1:
                raise ValueError("truncation degree N must be >= 1")


def _ml_series(alpha: float, z: complex):
    """Power series with term-ratio stopping; returns (value, max_term)."""
    total = complex(1.0)
    term = complex(1.0)
    max_term = 1.0
    for m in range(1, 2000):
        ratio = math.exp(math.lgamma(alpha * (m - 1) + 1.0) - math.lgamma(alpha * m + 1.0))
        term = term * z * ratio
        total += term
        max_term = max(max_term, abs(term))
        if abs(term) < 1e-18 * max(1.0, abs(total)) and m > 4:
            return total, max_term
    raise PrecisionLossError("series for E_alpha did not converge in 2000 terms")


def _ml_asymptotic(alpha: float, z: complex):
    """Algebraic tail (plus residue in the growth sector) for large |z|.

    Optimally truncated: term magnitudes oscillate through the sine factor
    of 1/Gamma(1 - alpha k) (with exact zeros at integer alpha k), so the
    sum is cut at the global minimum magnitude, not at the first increase.
    Returns (value, truncation error estimate).
    """
    kmax = 220
    terms = []
    zk = 1.0 / z
    min_mag, min_idx = np.inf, 0
    for k in range(1, kmax):
        term = -zk * _rgamma(1.0 - alpha * k)
        terms.append(term)
        mag = abs(term)
        if 0.0 < mag < min_mag:
            min_mag, min_idx = mag, k
        if mag > 1e8 * min_mag:
            break
        zk /= z
    total = sum(terms[:min_idx], complex(0.0))
    if abs(np.angle(z)) < alpha * np.pi:
        zr = z ** (1.0 / alpha)
        if zr.real < 700.0:
            total += np.exp(zr) / alpha
        else:
            return complex(np.inf, np.inf), 0.0
    return total, min_mag


def _ml_wedge_integral(alpha: float, z: complex) -> complex:
    """Collapsed Hankel-contour evaluation on rays arg(zeta) = +-psi."""
    theta = abs(np.angle(z))
    pole_angle = theta / alpha  # |arg| of the candidate pole z^(1/alpha)
    psi = np.pi
    if abs(pole_angle - psi) < 0.18:
        psi = np.pi - 0.35
        if abs(pole_angle - psi) < 0.15:
            psi = np.pi - 0.7
    psi = max(psi, min(0.51 * np.pi, np.pi))

    # substitution q = r^alpha along each ray zeta = r e^(+-i psi)
    q_hi = (45.0 / abs(np.cos(psi))) ** alpha

    def integrand(q):
        r = q ** (1.0 / alpha)
        up = np.exp(r * np.exp(1j * psi)) * np.exp(1j * alpha * psi) / (
            q * np.exp(1j * alpha * psi) - z
        )
        dn = np.exp(r * np.exp(-1j * psi)) * np.exp(-1j * alpha * psi) / (
            q * np.exp(-1j * alpha * psi) - z
        )
        val = (up - dn) / (2j * np.pi * alpha)
        return np.array([val.real, val.imag])

    res, err = integrate.quad_vec(
        integrand, 0.0, q_hi, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=400
    )
    value = complex(res[0], res[1])
    if err > 1e-8 * max(1.0, abs(value)):
        raise PrecisionLossError(
            f"contour quadrature for E_alpha reached only {err:.2e}", attained=err
        )
    if pole_angle < psi:  # pole enclosed by the wedge
        value += np.exp(z ** (1.0 / alpha)) / alpha
    return value


def _ml_half(z: complex) -> complex:
    """E_{1/2}(z) = exp(z^2) erfc(-z) via the Faddeeva function."""
    if (z * z).real < 700.0:
        return complex(_wofz(-1j * z))
    return _ml_asymptotic(0.5, z)[0]


def mittag_leffler(alpha: float, z) -> complex:
    """E_alpha(z) for 0 < alpha <= 1, relative accuracy ~1e-10.

    Scalars in, scalar out; ndarray in, elementwise ndarray out.  Raises
    PrecisionLossError where no branch reaches the target.  Values in the
    deep growth region that exceed double range come back as inf; use
    :func:`mittag_leffler_log` there.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    if isinstance(z, np.ndarray):
        flat = np.array([mittag_leffler(alpha, complex(v)) for v in z.ravel()])
        return flat.reshape(z.shape)
    z = complex(z)
    if z == 0:
        return complex(1.0)
    if alpha == 1.0:
        return complex(np.exp(z))
    if abs(alpha - 0.5) < 1e-14:
        return _ml_half(z)
    w = abs(z) ** (1.0 / alpha)
    if w <= _SERIES_W_MAX and abs(z) <= _SERIES_ABS_MAX:
        value, max_term = _ml_series(alpha, z)
        if 2.3e-16 * max_term <= 1e-11 * max(abs(value), 1e-300):
            return value
        # cancellation too strong: fall through to the contour
    if w >= _ASYMP_W_MIN:
        value, trunc = _ml_asymptotic(alpha, z)
        if not np.isfinite(abs(value)) or trunc <= 1e-10 * max(abs(value), 1e-300):
            return value
        # optimal truncation short of target: contour still converges here
    return _ml_wedge_integral(alpha, z)


def mittag_leffler_log(alpha: float, z) -> complex:
    """log E_alpha(z), safe in the deep growth sector.

    Where |exp(z^(1/alpha))| dominates every algebraic correction the log
    is z^(1/alpha) - log(alpha); otherwise log of the direct evaluation.
    """
    z = complex(z)
    if z == 0:
        return complex(0.0)
    if alpha == 1.0:
        return z
    if abs(np.angle(z)) < alpha * np.pi:
        zr = z ** (1.0 / alpha)
        if zr.real > 120.0:  # exp term dwarfs the O(1/z) tail
            return zr - math.log(alpha)
    val = mittag_leffler(alpha, z)
    if val == 0 or not np.isfinite(abs(val)):
        raise PrecisionLossError("log of non-finite Mittag-Leffler value")
    return complex(np.log(val))


def ml_truncated(n: int, N: int, z) -> complex:
    """Finite sum of the first nN + 1 terms of E_{1/n}; exact and deterministic."""
    params = MLParams(alpha=1.0 / n, n=n, N=N)
    z = np.asarray(z, dtype=complex)
    m = np.arange(n * params.N + 1)
    weights = _rgamma(m / n + 1.0)
    powers = z[..., None] ** m
    out = powers @ weights
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Regularization schedule
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class RegularizationConstants:
    """Everything the noisy-moment indicator needs at one probe point."""

    n: int
    beta0: float
    beta: float
    theta: float
    c_y: float
    C_y: float
    delta: float
    N: int
    tau: float


def beta0_root() -> float:
    """Unique positive root of (2/e) b + log b = 0; lies in (1/sqrt(e), 1)."""
    return brentq(lambda b: (2.0 / np.e) * b + np.log(b), 0.25, 0.999999, xtol=1e-15)


def _sup_distance(domain, y) -> float:
    y = np.asarray(y, dtype=float)
    if isinstance(domain, Disc):
        return float(np.linalg.norm(y - domain.center) + domain.radius)
    pts = np.asarray(domain, dtype=float)
    return float(np.max(np.linalg.norm(pts - y, axis=1)))


def regularization_constants(
    n: int,
    y,
    domain,
    delta: float,
    beta: Optional[float] = None,
    theta: float = 0.9,
) -> RegularizationConstants:
    """Truncation degree and evaluation point for noise level delta.

    ``domain`` is the scene region (a Disc, or an array of boundary
    points); c(y) = sup over the region of |x - y|.  Defaults follow the
    canonical choice beta = theta * beta0.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (0.0 < theta < 1.0):
        raise ValueError("theta must lie in (0, 1)")
    b0 = beta0_root()
    if beta is None:
        beta = theta * b0
    if not (0.0 < beta < b0):
        raise ValueError(f"beta must lie in (0, beta0 = {b0:.12f})")
    c_y = _sup_distance(domain, y)
    C_y = (beta / (theta * np.e)) * (1.0 + 1.0 / c_y**n)
    bound = math.exp(-C_y)
    if not (0.0 < delta <= bound):
        raise ValueError(f"delta must lie in (0, e^-C(y) = {bound:.6e}]")
    N = int(math.floor(-math.log(delta) / C_y))
    tau = ((N + 1.0 / n) / np.e) ** (1.0 / n) * beta ** (1.0 / n) / c_y
    return RegularizationConstants(
        n=n, beta0=b0, beta=beta, theta=theta, c_y=c_y, C_y=C_y, delta=delta, N=N, tau=tau
    )


# ---------------------------------------------------------------------------
# Modified spherical Bessel pairs
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class BesselTable:
    """Values i_l, k_l and derivatives for l = 0..lmax at one x.

    Normalization: k_0(x) = (pi/2) e^(-x)/x (so i_l k_l' - i_l' k_l =
    -pi/(2 x^2) for every l).  When ``scaled`` is True the stored arrays
    are e^(-x) i_l and e^(+x) k_l (and likewise the derivatives), with the
    true values recovered through log_scale_i/log_scale_k.
    """

    i: np.ndarray
    k: np.ndarray
    ip: np.ndarray
    kp: np.ndarray
    scaled: bool
    log_scale_i: float
    log_scale_k: float


_SCALE_LIMIT = 690.0  # exp overflow threshold with headroom


def modified_spherical_bessel(lmax: int, x: float, scaled: Optional[bool] = None) -> BesselTable:
    """Stable i_l (downward Miller) and k_l (upward) recurrences.

    ``scaled=None`` returns plain values when they fit in double range and
    a flagged scaled table otherwise; pass ``scaled=True`` to force the
    e^(+-x)-scaled representation.
    """
    if lmax < 0 or x <= 0:
        raise ValueError("need lmax >= 0 and x > 0")
    want_scaled = bool(scaled) or (scaled is None and x > _SCALE_LIMIT)

    # scaled second kind: kt_l = e^(+x) k_l, upward (stable)
    kt = np.empty(lmax + 2)
    kt[0] = (np.pi / 2.0) / x
    kt[1] = (np.pi / 2.0) * (1.0 / x + 1.0 / x**2)
    for l in range(1, lmax + 1):
        kt[l + 1] = kt[l - 1] + (2 * l + 1) / x * kt[l]
    ktp = np.empty(lmax + 1)
    ktp[0] = -kt[0] * (1.0 + 1.0 / x)
    for l in range(1, lmax + 1):
        ktp[l] = -kt[l - 1] - (l + 1) / x * kt[l]

    # scaled first kind: it_l = e^(-x) i_l, downward Miller normalized at l=0
    start = lmax + 16 + int(np.ceil(np.sqrt(40.0 * max(lmax, 1)))) + int(
        8 * max(0.0, np.log10(1.0 + 1.0 / x))
    )
    tiny = 1e-290
    f = np.zeros(start + 2)
    f[start + 1] = 0.0
    f[start] = tiny
    for l in range(start, 0, -1):
        f[l - 1] = f[l + 1] + (2 * l + 1) / x * f[l]
        if abs(f[l - 1]) > 1e250:  # renormalize mid-recurrence
            f[l - 1 :] *= 1e-250
    i0_scaled = (1.0 - np.exp(-2.0 * x)) / (2.0 * x)  # e^-x sinh(x)/x
    it = f[: lmax + 1] * (i0_scaled / f[0])
    # i_{-1} = cosh(x)/x, scaled: (1 + e^-2x)/(2x)
    im1_scaled = (1.0 + np.exp(-2.0 * x)) / (2.0 * x)
    itp = np.empty(lmax + 1)
    itp[0] = im1_scaled - it[0] / x
    for l in range(1, lmax + 1):
        itp[l] = it[l - 1] - (l + 1) / x * it[l]

    if want_scaled:
        return BesselTable(
            i=it, k=kt[: lmax + 1], ip=itp, kp=ktp, scaled=True, log_scale_i=x, log_scale_k=-x
        )
    ex = np.exp(x)
    return BesselTable(
        i=it * ex,
        k=kt[: lmax + 1] / ex,
        ip=itp * ex,
        kp=ktp / ex,
        scaled=False,
        log_scale_i=0.0,
        log_scale_k=0.0,
    )


# ---------------------------------------------------------------------------
# Needle potential and its Helmholtz transform
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class NeedleFrame:
    """Orthonormal pair spanning the plane transverse to the needle axis."""

    theta1: np.ndarray
    theta2: np.ndarray
    tau: float
    alpha: float

    def __post_init__(self):
        t1 = np.asarray(self.theta1, dtype=float)
        t2 = np.asarray(self.theta2, dtype=float)
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)
        if abs(np.linalg.norm(t1) - 1) > 1e-12 or abs(np.linalg.norm(t2) - 1) > 1e-12:
            raise ValueError("frame vectors must be unit")
        if abs(t1 @ t2) > 1e-12:
            raise ValueError("frame vectors must be orthogonal")
        if self.tau <= 0 or not (0 < self.alpha <= 1):
            raise ValueError("need tau > 0 and alpha in (0, 1]")

    @property
    def axis(self) -> np.ndarray:
        return np.cross(self.theta1, self.theta2)


def yarmukhamedov_axis_value(frame: NeedleFrame, s: float) -> float:
    """Needle potential on the axis: (E_alpha(tau s) - 1)/(4 pi s), tip value at s = 0."""
    if abs(s) < 1e-14:
        return frame.tau / (4.0 * np.pi * _gamma(1.0 + frame.alpha))
    return float(
        ((mittag_leffler(frame.alpha, frame.tau * s) - 1.0) / (4.0 * np.pi * s)).real
    )


def yarmukhamedov_tip_gradient(frame: NeedleFrame) -> np.ndarray:
    """Gradient at the tip: tau^2/(4 pi Gamma(1 + 2 alpha)) along the axis."""
    mag = frame.tau**2 / (4.0 * np.pi * _gamma(1.0 + 2.0 * frame.alpha))
    return mag * frame.axis


def yarmukhamedov_needle(y, frame: NeedleFrame, abs_tol: float = 1e-10) -> float:
    """Regular part of the cone-localized fundamental solution at y.

    y is measured from the needle tip.  Off the axis the value is the
    contour integral of Im[(E_alpha(tau w) - 1)/w] with w walking up the
    vertical line Re w = y.axis; the substitution u = rho sinh(t) makes
    the tail exponential.  On the axis the closed form is used.
    """
    out = yarmukhamedov_needle_many(np.asarray(y, dtype=float)[None, :], frame, abs_tol)
    return float(out[0])


def yarmukhamedov_needle_many(ys, frame: NeedleFrame, abs_tol: float = 1e-10) -> np.ndarray:
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    a = ys @ frame.axis
    rho = np.hypot(ys @ frame.theta1, ys @ frame.theta2)
    out = np.empty(len(ys))
    off = rho > 1e-12 * np.maximum(1.0, np.abs(a))
    for idx in np.nonzero(~off)[0]:
        out[idx] = yarmukhamedov_axis_value(frame, float(a[idx]))
    if not np.any(off):
        return out

    a_off, rho_off = a[off], rho[off]
    alpha, tau = frame.alpha, frame.tau

    def integrand(t):
        B = rho_off * np.cosh(t)
        w = a_off + 1j * B
        E = np.array([mittag_leffler(alpha, tau * complex(wv)) for wv in w])
        return ((E - 1.0) / w).imag

    t_max = 42.0
    vals, err = integrate.quad_vec(
        integrand, 0.0, t_max, epsabs=abs_tol * 0.05, epsrel=1e-12, limit=300
    )
    if err > abs_tol:
        raise PrecisionLossError(
            f"needle quadrature reached only {err:.2e} (target {abs_tol:.1e}); "
            "tau may be too large for this transverse distance",
            attained=err,
        )
    out[off] = -vals / (2.0 * np.pi**2)
    return out


def vekua_transform(v: Callable, k: float, y, abs_tol: float = 1e-10) -> float:
    """Map a harmonic function to a Helmholtz solution along the ray to y.

    v^k(y) = v(y) - (k |y|/2) * integral_0^1 v(t y) J1(k |y| sqrt(1-t))
    sqrt(t/(1-t)) dt, evaluated after t = 1 - s^2 removes the endpoint
    singularity.  k = 0 returns v(y) unchanged.
    """
    y = np.asarray(y, dtype=float)
    r = float(np.linalg.norm(y))
    v0 = float(v(y))
    if k == 0.0 or r == 0.0:
        return v0

    def integrand(s):
        t = 1.0 - s * s
        return v(t * y) * _besselj1(k * r * s) * np.sqrt(max(t, 0.0))

    val, err = integrate.quad_vec(
        integrand, 0.0, 1.0, epsabs=abs_tol * 0.1, epsrel=1e-12, limit=200
    )
    if err > abs_tol:
        raise PrecisionLossError(
            f"transform quadrature reached only {err:.2e}", attained=err
        )
    return v0 - k * r * float(val)
