"""Dyadic decomposition of the Lame-disc fractional-part sum and its
stationary-phase transform (a truncated Hardy identity).

The range (W/2)^(1/k) < n <= W^(1/k) of Delta_k(W) is cut at

    N_j = W^(1/k) (1 + 2^(-j q))^(-1/k),    q = k/(k-1),

where the phase -h (W - u^k)^(1/k) has derivative exactly h 2^j.  On each
piece the exponential sum over n is exchanged for a dual sum over
2^j h <= l <= 2^(j+1) h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from .lattice_count import ScalarPolicy, delta_k
from .vaaler import alpha_coeff, beta_coeff, sawtooth

OrderRule = Union[str, Callable[[int, float, float], int]]

_LD = np.longdouble


def _order_constant(j: int, k: float, W: float) -> int:
    return max(2, math.ceil(W**0.25))


def _order_tuned(j: int, k: float, W: float) -> int:
    # shape of the balanced choice for the 3D problem, with x ~ W^(1/k)
    e = (18 * k - 11) / (25 * (k - 1))
    return max(2, int(math.floor(2.0 ** (-j * e) * W ** (13 / (25 * k)))) + 1)


ORDER_RULES = {"constant": _order_constant, "tuned": _order_tuned}


@dataclass(frozen=True)
class DyadicScheme:
    W: float
    k: float
    lam: float
    c0: float
    J: int
    breakpoints: tuple
    orders: tuple
    tail_constant: float
    half_weights: bool = True

    @property
    def q(self) -> float:
        return self.k / (self.k - 1)

    def integers(self, j: int) -> np.ndarray:
        """Lattice points of ]N_j, N_{j+1}]."""
        lo, hi = self.breakpoints[j], self.breakpoints[j + 1]
        return np.arange(math.floor(lo) + 1, math.floor(hi) + 1, dtype=np.int64)

    def lattice_count(self, j: int) -> int:
        lo, hi = self.breakpoints[j], self.breakpoints[j + 1]
        return max(0, math.floor(hi) - math.floor(lo))


def depth(k: float, W: float, lam: float, c0: float) -> int:
    """J = ceil(log((W/c0)^((1-lam)/k)) / (q log 2)) + 1."""
    q = k / (k - 1)
    return math.ceil((1 - lam) / k * math.log(W / c0) / (q * math.log(2))) + 1


def breakpoint(k: float, W: float, j: int) -> float:
    q = k / (k - 1)
    return W ** (1 / k) * (1 + 2.0 ** (-j * q)) ** (-1 / k)


def build_scheme(k: float, W: float, lam: float = 0.0, c0: float = 1.0,
                 order_rule: OrderRule = "constant", half_weights: bool = True) -> DyadicScheme:
    if not k > 2:
        raise ValueError(f"need k > 2, got {k}")
    if not 0 <= lam < 1:
        raise ValueError(f"need 0 <= lambda < 1, got {lam}")
    if not c0 >= 1:
        raise ValueError(f"need c0 >= 1, got {c0}")
    if not W > c0:
        raise ValueError(f"W={W} too small for c0={c0}")
    J = depth(k, W, lam, c0)
    if J < 1:
        raise ValueError(f"degenerate scheme: J={J} for W={W}")
    rule = ORDER_RULES[order_rule] if isinstance(order_rule, str) else order_rule
    Ns = tuple(breakpoint(k, W, j) for j in range(J + 1))
    orders = tuple(int(rule(j, k, W)) for j in range(J))
    for H in orders:
        if not 2 <= H <= W:
            raise ValueError(f"order {H} outside 2..W")
    tail = (W ** (1 / k) - Ns[-1]) / W ** (lam / k)
    return DyadicScheme(W, k, lam, c0, J, Ns, orders, tail, half_weights)


def _gamma(kind: str, H: int) -> np.ndarray:
    if kind == "alpha":
        return np.array([alpha_coeff(h, H) for h in range(1, H)])
    if kind == "beta":
        return np.array([beta_coeff(h, H) for h in range(1, H)])
    raise ValueError(f"kind must be 'alpha' or 'beta', got {kind!r}")


def _e(frac: np.ndarray) -> np.ndarray:
    """e(t) = exp(2 pi i t) for t already reduced mod 1 (long double in)."""
    t = (frac - np.floor(frac)).astype(float)
    return np.exp(2j * math.pi * t)


def _disc_roots(scheme: DyadicScheme, n: np.ndarray) -> np.ndarray:
    W = _LD(scheme.W)
    k = _LD(scheme.k)
    return (W - n.astype(_LD) ** k) ** (1 / k)


def direct_exp_sum(scheme: DyadicScheme, j: int, h: int, kind: str = "alpha") -> complex:
    """gamma_{h,H_j} * sum over ]N_j, N_{j+1}] of e(-h (W - n^k)^(1/k))."""
    H = scheme.orders[j]
    if not 1 <= h < H:
        raise ValueError(f"h must lie in 1..{H - 1}")
    n = scheme.integers(j)
    if n.size == 0:
        return 0j
    g = _gamma(kind, H)[h - 1]
    return complex(g * _e(-h * _disc_roots(scheme, n)).sum())


def direct_sum(scheme: DyadicScheme, j: int, kind: str = "alpha") -> complex:
    """Sum over 0 < h < H_j of ``direct_exp_sum``."""
    H = scheme.orders[j]
    n = scheme.integers(j)
    if n.size == 0:
        return 0j
    h = np.arange(1, H)
    phase = -h[:, None].astype(_LD) * _disc_roots(scheme, n)[None, :]
    return complex(_gamma(kind, H) @ _e(phase).sum(axis=1))


def hardy_partial_sum(scheme: DyadicScheme, j: int, kind: str = "alpha") -> complex:
    """W^(1/(2k))/sqrt(k-1) sum_h gamma_h h sum_l (h l)^(q/2-1) (h^q + l^q)^(-1+1/(2q))
    e(W^(1/k) (h^q + l^q)^(1/q) - 1/8), with l from 2^j h to 2^(j+1) h."""
    H = scheme.orders[j]
    k, q = scheme.k, scheme.q
    gam = _gamma(kind, H)
    hs, ls, ws = [], [], []
    for h in range(1, H):
        l = np.arange(2**j * h, 2 ** (j + 1) * h + 1)
        w = np.ones(l.size)
        if scheme.half_weights:
            w[0] = w[-1] = 0.5
        hs.append(np.full(l.size, h))
        ls.append(l)
        ws.append(w * gam[h - 1] * h)
    h = np.concatenate(hs).astype(float)
    l = np.concatenate(ls).astype(float)
    w = np.concatenate(ws)
    S = h**q + l**q
    amp = w * (h * l) ** (q / 2 - 1) * S ** (-1 + 1 / (2 * q))
    Sl = h.astype(_LD) ** _LD(q) + l.astype(_LD) ** _LD(q)
    phase = _LD(scheme.W) ** (1 / _LD(k)) * Sl ** (1 / _LD(q)) - _LD(1) / 8
    pre = scheme.W ** (1 / (2 * k)) / math.sqrt(k - 1)
    return complex(pre * (amp * _e(phase)).sum())


def transform_check(scheme: DyadicScheme, j: int, kind: Optional[str] = None) -> float:
    """|direct sum - transformed sum| on interval j.

    The transformed side carries the conjugate phase
    e(-W^(1/k)(h^q + l^q)^(1/q) + 1/8), i.e. it is conj(hardy_partial_sum).
    Without ``kind`` the larger of the alpha and beta differences is returned.
    """
    if kind is None:
        return max(transform_check(scheme, j, "alpha"), transform_check(scheme, j, "beta"))
    lhs = direct_sum(scheme, j, kind)
    rhs = hardy_partial_sum(scheme, j, kind).conjugate()
    return abs(lhs - rhs)


PARTS = {
    "imag": lambda z: z.imag,
    "-imag": lambda z: -z.imag,
    "real": lambda z: z.real,
    "-real": lambda z: -z.real,
}


class HardyEvaluation(NamedTuple):
    main: float
    majorant: float
    lattice_term: float
    tail_term: float
    direct: float

    @property
    def c_emp(self) -> float:
        """Smallest C making the truncated identity hold here (clamped at 0)."""
        gap = abs(self.direct - self.main) - self.majorant - self.lattice_term
        return max(0.0, gap / self.tail_term)


def theorem2_check(k: float, W: float, lam: float = 0.47, order_rule: OrderRule = "constant",
                   part_selector: tuple = ("-imag", "real"), c0: float = 1.0,
                   policy: Optional[ScalarPolicy] = None, half_weights: bool = True) -> HardyEvaluation:
    scheme = build_scheme(k, W, lam, c0, order_rule, half_weights)
    sel_a, sel_b = PARTS[part_selector[0]], PARTS[part_selector[1]]
    main = math.fsum(sel_a(hardy_partial_sum(scheme, j, "alpha")) for j in range(scheme.J))
    major = math.fsum(sel_b(hardy_partial_sum(scheme, j, "beta")) for j in range(scheme.J))
    lattice = math.fsum(scheme.lattice_count(j) / scheme.orders[j] for j in range(scheme.J))
    tail = W ** (lam / k) + math.log(W) ** 3
    return HardyEvaluation(main, major, lattice, tail, delta_k(k, W, policy))


def smoothed_delta(scheme: DyadicScheme, kind: str = "alpha") -> float:
    """Delta_k restricted to ]N_0, N_J] with psi replaced by psi_H (alpha)
    or psi_H* (beta), evaluated directly."""
    total = []
    for j in range(scheme.J):
        n = scheme.integers(j)
        if n.size == 0:
            continue
        H = scheme.orders[j]
        f = _disc_roots(scheme, n)
        frac = (f - np.floor(f)).astype(float)
        h = np.arange(1, H)
        arg = 2 * math.pi * np.outer(frac, h)
        g = _gamma(kind, H)
        vals = -(np.sin(arg) @ g) if kind == "alpha" else np.cos(arg) @ g
        total.append(math.fsum(vals))
    return math.fsum(total)


def truncated_delta(scheme: DyadicScheme) -> float:
    """Delta_k restricted to ]N_0, N_J], straight from the sawtooth."""
    vals = []
    for j in range(scheme.J):
        n = scheme.integers(j)
        f = _disc_roots(scheme, n)
        vals.extend(sawtooth((f - np.floor(f)).astype(float)))
    return math.fsum(vals)
