"""Gamma constants, generalized Bessel functions and the flat-point main terms.

The generalized Bessel function of shape ``eta`` and order ``nu`` is

    J(x) = 2 / (sqrt(pi) Gamma(nu + 1 - 1/eta)) * (x/2)**(eta*nu/2)
           * int_0^1 (1 - t**eta)**(nu - 1/eta) cos(x t) dt

and ``psi_eta_series`` sums it along the lattice frequencies ``2 pi n x``.
The two main terms H1, H2 attached to the flat points of the body are built
from these, either from their defining series/integral ("exact") or from
their leading sine series ("asymptotic").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import mpmath
import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import integrate, special


class DomainError(ValueError):
    """Argument outside the region where a formula is defined."""


@dataclass(frozen=True)
class BesselParams:
    eta: float
    nu: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and math.isfinite(self.nu)):
            raise DomainError("eta and nu must be finite")
        if self.eta < 1:
            raise DomainError(f"eta must be >= 1, got {self.eta}")

    @property
    def alpha(self) -> float:
        """Exponent of (1 - t**eta) in the integral representation."""
        return self.nu - 1.0 / self.eta


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and quadrature settings.

    ``n_max=None`` sums the asymptotic sine series of the main terms in
    closed form; the Bessel series always needs a finite ``n_max``.
    """

    n_max: Optional[int] = 200
    quad_tol: float = 1e-11
    asym_threshold: float = 20.0

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")
        if not self.asym_threshold > 0:
            raise ValueError("asym_threshold must be positive")


DEFAULT_SERIES = SeriesConfig()
FULL_SERIES = SeriesConfig(n_max=None)


@dataclass(frozen=True)
class MainTermParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a >= self.b >= 2):
            raise DomainError(f"need a >= b >= 2, got a={self.a}, b={self.b}")


class SeriesValue(NamedTuple):
    value: float
    tail: float


def _check_finite_positive(name: str, v: float) -> None:
    if not math.isfinite(v):
        raise DomainError(f"{name} must be finite, got {v}")
    if v <= 0:
        raise DomainError(f"{name} must be positive, got {v}")


def lame_area(k: float) -> float:
    """Area 2 Gamma(1/k)**2 / (k Gamma(2/k)) of |u|**k + |v|**k <= 1."""
    _check_finite_positive("k", k)
    # lgamma keeps large k (Gamma(1/k) ~ k) and tiny k away from overflow
    return 2.0 * math.exp(2.0 * math.lgamma(1.0 / k) - math.lgamma(2.0 / k)) / k


def volume_factor(a: float) -> float:
    """2 Gamma(1 + 2/a) Gamma(1/a) / (a Gamma(1 + 3/a))."""
    _check_finite_positive("a", a)
    lg = math.lgamma(1 + 2 / a) + math.lgamma(1 / a) - math.lgamma(1 + 3 / a)
    return 2.0 * math.exp(lg) / a


def body_volume(p) -> float:
    """Volume of |u1|**(mk) + (|u2|**k + |u3|**k)**m <= 1.

    ``p`` is anything with ``m`` and ``k`` attributes (normally BodyParams).
    """
    _check_finite_positive("m", p.m)
    _check_finite_positive("k", p.k)
    return lame_area(p.k) * volume_factor(p.m * p.k)


# -- generalized Bessel functions -------------------------------------------


def _smooth_ratio(t, eta):
    """(1 - t**eta) / (1 - t), accurate up to t = 1 where it equals eta."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, float(eta))
    inner = (t > 0) & (t < 1)
    ti = t[inner]
    out[inner] = -np.expm1(eta * np.log(ti)) / (1.0 - ti)
    out[t == 0] = 1.0
    return out


def bessel_integral(eta: float, alpha: float, x: float, tol: float) -> float:
    """int_0^1 (1 - t**eta)**alpha cos(x t) dt by panel-wise adaptive quadrature.

    Panels end at the zeros of cos(x t); the last panel carries the algebraic
    factor (1 - t)**alpha as a quadrature weight.
    """
    if alpha <= -1:
        raise DomainError("(1 - t**eta)**alpha is not integrable for alpha <= -1")
    zeros = []
    if x > 0:
        j = 0
        while True:
            z = (j + 0.5) * math.pi / x
            if z >= 1.0:
                break
            zeros.append(z)
            j += 1
    edges = [0.0] + zeros + [1.0]
    n_panels = len(edges) - 1
    eps = tol / n_panels

    def body(t):
        return (1.0 - t**eta) ** alpha * math.cos(x * t)

    def last(t):
        return float(_smooth_ratio(np.array([t]), eta)[0]) ** alpha * math.cos(x * t)

    total = 0.0
    for lo, hi in zip(edges[:-2], edges[1:-1]):
        val, _ = integrate.quad(body, lo, hi, epsabs=eps, epsrel=1e-14, limit=200)
        total += val
    lo = edges[-2]
    val, _ = integrate.quad(last, lo, 1.0, weight="alg", wvar=(0.0, alpha),
                            epsabs=eps, epsrel=1e-14, limit=200)
    return total + val


def _bessel_prefactor(bp: BesselParams, x):
    return (2.0 / (math.sqrt(math.pi) * math.gamma(bp.alpha + 1.0))
            * np.power(np.asarray(x, dtype=float) / 2.0, bp.eta * bp.nu / 2.0))


def gen_bessel(bp: BesselParams, x: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """J_nu^(eta)(x) from its integral representation.

    Valid whenever the endpoint factor is integrable (nu - 1/eta > -1); the
    stricter nu > 1/eta is only needed for ``psi_eta_series`` to converge.
    """
    if bp.alpha <= -1:
        raise DomainError(f"nu - 1/eta must exceed -1, got {bp.alpha}")
    _check_finite_positive("x", x)
    pre = float(_bessel_prefactor(bp, x))
    # the tolerance is on J, so shrink it by the prefactor
    integral = bessel_integral(bp.eta, bp.alpha, x, cfg.quad_tol / max(pre, 1.0))
    return pre * integral


def gen_bessel_asymptotic(bp: BesselParams, y):
    """Leading large-argument form of J_nu^(eta)(y).

    It is the contribution of the t = 1 endpoint of the integral,
    (2/sqrt(pi)) 2**(-eta nu/2) eta**alpha y**(eta nu/2 - alpha - 1)
    cos(y - pi (alpha + 1)/2), with relative error O(1/y).  For
    (nu, eta) = (2/b, b) it is (1/sqrt(pi)) (b/y)**(1/b) sin(y - pi/(2b)).
    """
    eta, nu, alpha = bp.eta, bp.nu, bp.alpha
    y = np.asarray(y, dtype=float)
    return (2.0 / math.sqrt(math.pi) * 2.0 ** (-eta * nu / 2) * eta**alpha
            * y ** (eta * nu / 2 - alpha - 1) * np.cos(y - math.pi * (alpha + 1) / 2))


@lru_cache(maxsize=64)
def _integral_table(eta: float, alpha: float, top: float, tol: float):
    """Chebyshev interpolant of y -> int_0^1 (1-t**eta)**alpha cos(y t) dt on [0, top].

    The integral is entire in y, so a modest degree reaches quadrature accuracy.
    """
    deg = max(32, int(2 * top) + 32)
    fn = np.vectorize(lambda y: bessel_integral(eta, alpha, float(y), tol))
    return cheb.Chebyshev.interpolate(fn, deg, domain=[0.0, top])


def _term_amplitude(bp: BesselParams, x: float) -> float:
    """Large-n amplitude c with |term_n| ~ c n**(-alpha-1) in psi_eta_series."""
    alpha = bp.alpha
    return (4.0 * math.gamma(alpha + 1) * bp.eta**alpha * x ** (bp.eta * bp.nu)
            * (2 * math.pi * x) ** (-alpha - 1))


def psi_eta_terms(bp: BesselParams, x, cfg: SeriesConfig = DEFAULT_SERIES) -> np.ndarray:
    """Terms n = 1..n_max of psi_nu^(eta) at each x (shape x.shape + (n_max,))."""
    if cfg.n_max is None:
        raise ValueError("the Bessel series needs a finite n_max")
    if bp.alpha <= 0:
        raise DomainError(f"series needs nu > 1/eta, got nu={bp.nu}, eta={bp.eta}")
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("x must be positive")
    n = np.arange(1, cfg.n_max + 1, dtype=float)
    y = 2 * math.pi * x[..., None] * n
    jv = np.empty_like(y)
    far = y > cfg.asym_threshold
    jv[far] = gen_bessel_asymptotic(bp, y[far])
    if np.any(~far):
        table = _integral_table(bp.eta, bp.alpha, float(cfg.asym_threshold), cfg.quad_tol * 1e-2)
        near = y[~far]
        jv[~far] = _bessel_prefactor(bp, near) * table(near)
    coef = 2.0 * math.sqrt(math.pi) * math.gamma(bp.alpha + 1)
    return coef * (x[..., None] / (math.pi * n)) ** (bp.eta * bp.nu / 2) * jv


def psi_eta_series(bp: BesselParams, x: float, cfg: SeriesConfig = DEFAULT_SERIES) -> SeriesValue:
    """psi_nu^(eta)(x) truncated to n_max terms, with an envelope for the tail.

    The tail bound integrates the large-n amplitude from n_max to infinity,
    so it is infinite for the empty sum.
    """
    _check_finite_positive("x", x)
    if bp.alpha <= 0:
        raise DomainError(f"series needs nu > 1/eta, got nu={bp.nu}, eta={bp.eta}")
    if cfg.n_max is None:
        raise ValueError("the Bessel series needs a finite n_max")
    if cfg.n_max == 0:
        return SeriesValue(0.0, math.inf)
    terms = psi_eta_terms(bp, np.array([x]), cfg)[0]
    tail = _term_amplitude(bp, x) * cfg.n_max ** (-bp.alpha) / bp.alpha
    return SeriesValue(math.fsum(terms), tail)


# -- main terms ---------------------------------------------------------------


def c1(p: MainTermParams) -> float:
    a = p.a
    return lame_area(p.b) * (2 / math.pi) * (a / (2 * math.pi)) ** (2 / a) * math.gamma(1 + 2 / a)


def c2(p: MainTermParams) -> float:
    a, b = p.a, p.b
    return (16 / math.pi * a ** (1 / a) * b ** (1 / b) / (2 * math.pi) ** (1 / a + 1 / b)
            * math.gamma(1 + 1 / a) * math.gamma(1 + 1 / b))


def sine_series(x: float, s: float, phase: float, n_max: Optional[int] = None) -> float:
    """sum_{n>=1} sin(2 pi n x - phase) / n**s for s > 1.

    With ``n_max=None`` the full series is Im(e(-phase) Li_s(e(x))), where the
    polylogarithm on the unit circle comes from the Hurwitz zeta function
    (Jonquiere's inversion formula), or from mpmath's polylog at integer s.
    """
    if n_max is not None:
        n = np.arange(1, n_max + 1, dtype=float)
        return math.fsum(np.sin(2 * math.pi * n * x - phase) / n**s)
    f = x - math.floor(x)
    with mpmath.workdps(30):
        if f == 0:
            li = mpmath.zeta(s)
        elif float(s).is_integer():
            # Gamma(1 - s) has a pole here; mpmath handles integer orders directly
            li = mpmath.polylog(int(s), mpmath.expjpi(2 * mpmath.mpf(f)))
        else:
            i = mpmath.mpc(0, 1)
            li = (mpmath.gamma(1 - s) * (2 * mpmath.pi) ** (s - 1)
                  * (i ** (1 - s) * mpmath.zeta(1 - s, f) + i ** (s - 1) * mpmath.zeta(1 - s, 1 - f)))
        return float(mpmath.im(mpmath.exp(mpmath.mpc(0, -phase)) * li))


def _asymptotic(p: MainTermParams, x: float, kind: int, n_max: Optional[int]) -> float:
    if kind == 1:
        expo = 2 / p.a
        return c1(p) * x ** (2 - expo) * sine_series(x, 1 + expo, math.pi / p.a, n_max)
    s = 1 / p.a + 1 / p.b
    phase = math.pi / (2 * p.a) + math.pi / (2 * p.b)
    return c2(p) * x ** (2 - s) * sine_series(x, 1 + s, phase, n_max)


def main_term_tail(p: MainTermParams, x: float, kind: int, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Bound on the dropped n > n_max part of the asymptotic sine series."""
    if kind == 1:
        s = 2 / p.a
        amp = c1(p) * x ** (2 - s)
    elif kind == 2:
        s = 1 / p.a + 1 / p.b
        amp = c2(p) * x ** (2 - s)
    else:
        raise ValueError(f"kind must be 1 or 2, got {kind!r}")
    if cfg.n_max is None:
        return 0.0
    if cfg.n_max == 0:
        return math.inf
    return amp * cfg.n_max ** (-s) / s


def _h2_exact(p: MainTermParams, x: float, cfg: SeriesConfig) -> float:
    """8x int_0^1 t**(a-1) (1-t**a)**(1/a-1) psi_{2/b}^(b)(x t) dt.

    Panels are aligned with the integers of x t and sized to resolve the
    highest retained harmonic; the panel touching t = 1 uses Gauss-Jacobi
    with the (1-t)**(1/a-1) weight.
    """
    a, b = p.a, p.b
    bp = BesselParams(b, 2 / b)
    if cfg.n_max is None:
        # the inner Bessel series has no closed form; fall back to the default truncation
        cfg = SeriesConfig(DEFAULT_SERIES.n_max, cfg.quad_tol, cfg.asym_threshold)
    per_unit = max(4, 2 * cfg.n_max)
    n_panels = max(8, int(math.ceil(x * per_unit)))
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    order = 8
    gl_s, gl_w = special.roots_legendre(order)
    lo, hi = edges[:-2, None], edges[1:-1, None]
    t = (lo + hi) / 2 + (hi - lo) / 2 * gl_s
    w = (hi - lo) / 2 * gl_w * np.ones_like(t)
    t, w = t.ravel(), w.ravel()
    g = t ** (a - 1) * (1 - t**a) ** (1 / a - 1)

    jalpha = 1 / a - 1
    gj_s, gj_w = special.roots_jacobi(order, jalpha, 0.0)
    t0 = edges[-2]
    tj = t0 + (1 - t0) * (1 + gj_s) / 2
    wj = gj_w * ((1 - t0) / 2) ** (jalpha + 1)
    gj = tj ** (a - 1) * _smooth_ratio(tj, a) ** jalpha

    nodes = np.concatenate([t, tj])
    weights = np.concatenate([w * g, wj * gj])
    total = 0.0
    chunk = 4096
    parts = []
    for i in range(0, nodes.size, chunk):
        psi = psi_eta_terms(bp, x * nodes[i:i + chunk], cfg).sum(axis=-1)
        parts.append(np.dot(weights[i:i + chunk], psi))
    total = math.fsum(parts)
    return 8 * x * total


def main_term(p: MainTermParams, x: float, kind: int, mode: str = "asymptotic",
              cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """H_{a,b,kind}(x).

    ``mode="exact"`` evaluates the defining series (kind 1) or integral
    (kind 2); ``mode="asymptotic"`` returns the sine series without its O(x)
    remainder, truncated at ``cfg.n_max`` terms or summed in full when that
    is None.
    """
    if kind not in (1, 2):
        raise ValueError(f"kind must be 1 or 2, got {kind!r}")
    if mode not in ("exact", "asymptotic"):
        raise ValueError(f"mode must be 'exact' or 'asymptotic', got {mode!r}")
    _check_finite_positive("x", x)
    if mode == "asymptotic":
        return _asymptotic(p, x, kind, cfg.n_max)
    if kind == 1:
        return lame_area(p.b) * psi_eta_series(BesselParams(p.a, 3 / p.a), x, cfg).value
    return _h2_exact(p, x, cfg)
