"""Exact lattice-point counts for Lame discs and the bodies x*B_{m,k}.

B_{m,k} = {|u1|**(mk) + (|u2|**k + |u3|**k)**m <= 1}.  Counts are exact:
with integral exponents every comparison is done on Python/NumPy integers;
otherwise comparisons are made in floating point and any point falling within
``guard_eps`` (relative) of the boundary is re-decided with mpmath at 50
digits (120 on a tie).  Points still undecided there are reported as
``ambiguous``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional

import mpmath
import numpy as np

from .special_fn import DEFAULT_SERIES, SeriesConfig, lame_area, sine_series
from .vaaler import sawtooth

_MP_DPS = 50
_MP_TIE = mpmath.mpf(10) ** -40
_MP_DPS_HIGH = 120
_MP_TIE_HIGH = mpmath.mpf(10) ** -100
# keep every intermediate k-th power comfortably inside int64
_INT64_SAFE = 1 << 60


class AmbiguityError(ArithmeticError):
    """A boundary decision could not be made even at elevated precision."""


@dataclass(frozen=True)
class BodyParams:
    m: float
    k: float
    relaxed: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.k)):
            raise ValueError("m and k must be finite")
        if self.relaxed:
            if self.m < 1 or self.k < 2:
                raise ValueError(f"relaxed mode needs m >= 1, k >= 2, got m={self.m}, k={self.k}")
        elif not (self.m > 1 and self.k > 2):
            raise ValueError(f"need m > 1 and k > 2 (use relaxed=True for oracle tests), "
                             f"got m={self.m}, k={self.k}")

    @property
    def a(self) -> float:
        return self.m * self.k

    @property
    def exact_mode(self) -> bool:
        return float(self.m).is_integer() and float(self.k).is_integer()

    def check_asymptotic_range(self) -> None:
        """Refuse parameters outside m > 1, k > 2, mk >= 7/3."""
        if self.relaxed and not (self.m > 1 and self.k > 2):
            raise ValueError("asymptotic formulas need m > 1 and k > 2")
        if Fraction(self.m) * Fraction(self.k) < Fraction(7, 3):
            raise ValueError(f"asymptotic formulas need mk >= 7/3, got {self.a}")


@dataclass(frozen=True)
class ScalarPolicy:
    mode: str = "guarded-float"
    guard_eps: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("exact-integer", "guarded-float"):
            raise ValueError(f"unknown scalar mode {self.mode!r}")
        if not self.guard_eps > 0:
            raise ValueError("guard_eps must be positive")

    @classmethod
    def for_exponents(cls, *exponents: float, guard_eps: float = 1e-9) -> "ScalarPolicy":
        exact = all(float(e).is_integer() for e in exponents)
        return cls("exact-integer" if exact else "guarded-float", guard_eps)

    @property
    def exact(self) -> bool:
        return self.mode == "exact-integer"


class CountResult(NamedTuple):
    count: int
    ambiguous: int = 0


def _require_integral(policy: ScalarPolicy, *exponents: float) -> tuple:
    if not all(float(e).is_integer() for e in exponents):
        raise ValueError("exact-integer policy needs integral exponents")
    return tuple(int(e) for e in exponents)


def _resolve_policy(policy: Optional[ScalarPolicy], *exponents: float) -> ScalarPolicy:
    if policy is None:
        return ScalarPolicy.for_exponents(*exponents)
    if policy.exact:
        _require_integral(policy, *exponents)
    return policy


# -- integer helpers ------------------------------------------------------------


def iroot(n: int, k: int) -> int:
    """Largest r >= 0 with r**k <= n."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if k == 1 or n < 2:
        return n
    if n.bit_length() <= 150:
        r = int(float(n) ** (1.0 / k))
    else:
        r = 1 << -(-n.bit_length() // k)
        while True:
            s = ((k - 1) * r + n // r ** (k - 1)) // k
            if s >= r:
                break
            r = s
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    f = float(v)
    if not math.isfinite(f):
        raise ValueError(f"non-finite value {v!r}")
    return Fraction(f)


def _floor_fraction(v: Fraction) -> int:
    return v.numerator // v.denominator


def _lame_int(k: int, W: int) -> int:
    """#{(n2, n3) : |n2|**k + |n3|**k <= W} for integers k, W >= 0."""
    if W < 0:
        return 0
    top = iroot(W, k)
    if W < _INT64_SAFE:
        n2 = np.arange(top + 1, dtype=np.int64)
        rem = W - n2**k
        c = np.floor(rem.astype(float) ** (1.0 / k)).astype(np.int64)
        # float roots may be off by one either way
        while True:
            up = (c + 1) ** k <= rem
            if not up.any():
                break
            c += up
        while True:
            down = c**k > rem
            if not down.any():
                break
            c -= down
        cols = 2 * c + 1
        return int(cols[0] + 2 * cols[1:].sum())
    # two pointers: the column height only shrinks as n2 grows
    total = 0
    n3 = top
    for n2 in range(top + 1):
        p2 = n2**k
        while n3 >= 0 and p2 + n3**k > W:
            n3 -= 1
        total += (2 * n3 + 1) * (1 if n2 == 0 else 2)
    return total


# -- guarded floating point ------------------------------------------------------


def _mp_compare(lhs: Callable[[], "mpmath.mpf"], rhs: Callable[[], "mpmath.mpf"]) -> Optional[bool]:
    """lhs <= rhs at 50 digits, escalating to 120 digits on a 40-digit tie.

    A tie that survives escalation is a boundary incidence (inside).  None is
    returned only if the two precisions contradict each other.
    """
    with mpmath.workdps(_MP_DPS):
        a, b = lhs(), rhs()
        if abs(a - b) > _MP_TIE * max(mpmath.mpf(1), abs(b)):
            return bool(a <= b)
    with mpmath.workdps(_MP_DPS_HIGH):
        a, b = lhs(), rhs()
        if abs(a - b) <= _MP_TIE_HIGH * max(mpmath.mpf(1), abs(b)):
            return True
        if abs(a - b) > _MP_TIE * max(mpmath.mpf(1), abs(b)):
            return None
        return bool(a <= b)


class _Tally:
    __slots__ = ("ambiguous",)

    def __init__(self):
        self.ambiguous = 0


def _float_lame_columns(k: float, W: float, eps: float,
                        exact_le: Callable[[int, int], Optional[bool]], tally: _Tally) -> np.ndarray:
    """Per column n2 = 0, 1, ..., the largest n3 >= 0 inside (or -1).

    Membership is n2**k + n3**k <= W in floating point; points within eps*W
    of the boundary go to ``exact_le``.  Undecidable points count as inside.
    """
    if W < 0:
        return np.empty(0, dtype=np.int64)
    top = int(math.floor(W ** (1.0 / k))) + 1
    n2 = np.arange(top + 1, dtype=float)
    rem = W - n2**k
    c = np.where(rem >= 0, np.floor(np.maximum(rem, 0.0) ** (1.0 / k)), -1.0)
    band = eps * max(W, 1.0)

    def margin(a, b):
        return a**k + b**k - W

    # fast accept: c strictly inside and c + 1 strictly outside
    inside_ok = (c < 0) | (margin(n2, np.maximum(c, 0)) < -band)
    outside_ok = margin(n2, c + 1) > band
    cols = c.astype(np.int64)

    def member(i: int, j: int) -> bool:
        d = float(i) ** k + float(j) ** k - W
        if d < -band:
            return True
        if d > band:
            return False
        r = exact_le(i, j)
        if r is None:
            tally.ambiguous += 1
            return True
        return r

    for i in np.nonzero(~(inside_ok & outside_ok))[0]:
        j = int(cols[i])
        while member(int(i), j + 1):
            j += 1
        while j >= 0 and not member(int(i), j):
            j -= 1
        cols[i] = j
    return cols


def _columns_to_count(cols: np.ndarray) -> int:
    if cols.size == 0:
        return 0
    heights = np.where(cols >= 0, 2 * cols + 1, 0)
    return int(heights[0] + 2 * heights[1:].sum())


# -- public operations --------------------------------------------------------------


def lame_count(k: float, W: float, policy: Optional[ScalarPolicy] = None) -> CountResult:
    """L_k(W) = #{(n2, n3) in Z^2 : |n2|**k + |n3|**k <= W}."""
    if W < 0:
        raise ValueError("W must be nonnegative")
    policy = _resolve_policy(policy, k)
    if policy.exact:
        (ki,) = _require_integral(policy, k)
        return CountResult(_lame_int(ki, _floor_fraction(_as_fraction(W))), 0)
    Wf = float(W)
    tally = _Tally()

    def exact_le(i, j):
        return _mp_compare(lambda: mpmath.mpf(i) ** k + mpmath.mpf(j) ** k, lambda: mpmath.mpf(Wf))

    cols = _float_lame_columns(float(k), Wf, policy.guard_eps, exact_le, tally)
    return CountResult(_columns_to_count(cols), tally.ambiguous)


def _frac_part_root(R: Fraction, k: int) -> float:
    """R**(1/k) - floor(R**(1/k)) for rational R >= 0, exact at perfect powers."""
    r = iroot(_floor_fraction(R), k)
    if R.denominator == 1 and r**k == R.numerator:
        return 0.0
    f = float(R) ** (1.0 / k) - r
    if 1e-9 < f < 1 - 1e-9:
        return f
    with mpmath.workdps(_MP_DPS):
        root = mpmath.root(mpmath.mpf(R.numerator) / R.denominator, k)
        return float(root - r)


def _delta_range_exact(k: int, Wf: Fraction) -> range:
    lo = iroot(_floor_fraction(Wf / 2), k) + 1
    hi = iroot(_floor_fraction(Wf), k)
    return range(lo, hi + 1)


def _float_le(a: float, b: float, eps: float, exact: Callable[[], Optional[bool]]) -> bool:
    band = eps * max(abs(b), 1.0)
    if a < b - band:
        return True
    if a > b + band:
        return False
    r = exact()
    if r is None:
        raise AmbiguityError(f"cannot order {a!r} and {b!r}")
    return r


def _delta_range_float(k: float, W: float, eps: float) -> range:
    """n with W/2 < n**k <= W, boundary comparisons guarded."""
    lo_guess = int(math.floor((W / 2) ** (1.0 / k)))
    hi_guess = int(math.floor(W ** (1.0 / k)))

    def le(n, rhs):
        return _float_le(float(n) ** k, rhs, eps,
                         lambda: _mp_compare(lambda: mpmath.mpf(n) ** k, lambda: mpmath.mpf(rhs)))

    lo = max(lo_guess - 1, 0)
    while le(lo, W / 2):
        lo += 1
    while lo > 1 and not le(lo - 1, W / 2):
        lo -= 1
    hi = hi_guess + 1
    while hi >= 0 and not le(hi, W):
        hi -= 1
    return range(lo, hi + 1)


def delta_k(k: float, W: float, policy: Optional[ScalarPolicy] = None) -> float:
    """Sum of psi((W - n**k)**(1/k)) over (W/2)**(1/k) < n <= W**(1/k)."""
    if not W > 0:
        raise ValueError("W must be positive")
    policy = _resolve_policy(policy, k)
    if policy.exact:
        (ki,) = _require_integral(policy, k)
        Wf = _as_fraction(W)
        fracs = [_frac_part_root(Wf - n**ki, ki) for n in _delta_range_exact(ki, Wf)]
        return math.fsum(f - 0.5 for f in fracs)
    W = float(W)
    k = float(k)
    vals = []
    for n in _delta_range_float(k, W, policy.guard_eps):
        rad = W - float(n) ** k
        root = max(rad, 0.0) ** (1.0 / k)
        near = round(root)
        if abs(root - near) > policy.guard_eps * max(root, 1.0):
            vals.append(sawtooth(root))
            continue
        with mpmath.workdps(_MP_DPS):
            rad_mp = mpmath.mpf(W) - mpmath.mpf(n) ** k
            root_mp = mpmath.root(rad_mp, k) if rad_mp > 0 else mpmath.mpf(0)
            if abs(root_mp - mpmath.nint(root_mp)) <= _MP_TIE * max(1, root_mp):
                vals.append(-0.5)
            else:
                vals.append(float(root_mp - mpmath.floor(root_mp) - mpmath.mpf(0.5)))
    return math.fsum(vals)


def _root_sum(k: float, W: float, policy: ScalarPolicy) -> float:
    """Sum over |n|**k <= W of (W - |n|**k)**(1/k)."""
    if policy.exact:
        ki = int(k)
        Wf = _as_fraction(W)
        top = iroot(_floor_fraction(Wf), ki)
    else:
        top = int(math.floor(float(W) ** (1.0 / k))) + 1
    n = np.arange(top + 1, dtype=float)
    # boundary terms are ~0, so a clamp is all the care membership needs
    terms = np.maximum(float(W) - n**k, 0.0) ** (1.0 / k)
    return terms[0] + 2 * math.fsum(terms[1:])


def i_k(k: float, W: float, policy: Optional[ScalarPolicy] = None,
        cfg: SeriesConfig = DEFAULT_SERIES, mode: str = "sum") -> float:
    """The Euler-summation term of the Lame disc.

    ``mode="sum"``: 1/2 sum_{|n|^k <= W} (W - |n|^k)^(1/k) - (a_k/4) W^(2/k).
    ``mode="series"``: its sine-series approximation up to O(1), truncated at
    ``cfg.n_max`` terms (summed in full when that is None).
    """
    if not W > 0:
        raise ValueError("W must be positive")
    if mode == "sum":
        policy = _resolve_policy(policy, k)
        return 0.5 * _root_sum(k, W, policy) - lame_area(k) / 4 * float(W) ** (2 / k)
    if mode == "series":
        amp = (1 / math.pi * (k / (2 * math.pi)) ** (1 / k) * math.gamma(1 + 1 / k)
               * float(W) ** (1 / k - 1 / k**2))
        return amp * sine_series(float(W) ** (1 / k), 1 + 1 / k, math.pi / (2 * k), cfg.n_max)
    raise ValueError(f"mode must be 'sum' or 'series', got {mode!r}")


def slice_identity_residual(k: float, W: float, policy: Optional[ScalarPolicy] = None) -> float:
    """L_k(W) - a_k W^(2/k) - 8 I_k(W) + 8 Delta_k(W); bounded in W."""
    policy = _resolve_policy(policy, k)
    L = lame_count(k, W, policy)
    if L.ambiguous:
        raise AmbiguityError(f"{L.ambiguous} undecided boundary points at W={W}")
    return (L.count - lame_area(k) * float(W) ** (2 / k)
            - 8 * i_k(k, W, policy, mode="sum") + 8 * delta_k(k, W, policy))


def _slice_float(p: BodyParams, xf: float, n1: int, eps: float, tally: _Tally) -> int:
    a, m, k = p.a, p.m, p.k
    R = xf**a - float(n1) ** a
    if R < 0:
        return 0
    W = R ** (1.0 / m)

    def exact_le(i, j):
        return _mp_compare(
            lambda: mpmath.mpf(n1) ** a + (mpmath.mpf(i) ** k + mpmath.mpf(j) ** k) ** m,
            lambda: mpmath.mpf(xf) ** a)

    return _columns_to_count(_float_lame_columns(k, W, eps, exact_le, tally))


def count_A(p: BodyParams, x: float, policy: Optional[ScalarPolicy] = None,
            method: str = "sliced") -> CountResult:
    """A_{m,k}(x) = #(x B_{m,k} intersected with Z^3)."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    policy = _resolve_policy(policy, p.m, p.k)
    if method == "bruteforce":
        return _count_bruteforce(p, x, policy)
    if method != "sliced":
        raise ValueError(f"method must be 'sliced' or 'bruteforce', got {method!r}")
    if policy.exact:
        m, k = _require_integral(policy, p.m, p.k)
        X = _as_fraction(x) ** (m * k)
        top = _floor_fraction(_as_fraction(x))
        total = 0
        for n1 in range(top + 1):
            s = iroot(_floor_fraction(X - n1 ** (m * k)), m)
            total += _lame_int(k, s) * (1 if n1 == 0 else 2)
        return CountResult(total, 0)
    xf = float(x)
    tally = _Tally()
    total = 0
    for n1 in range(int(math.floor(xf)) + 1):
        total += _slice_float(p, xf, n1, policy.guard_eps, tally) * (1 if n1 == 0 else 2)
    return CountResult(total, tally.ambiguous)


def _count_bruteforce(p: BodyParams, x: float, policy: ScalarPolicy) -> CountResult:
    """Triple loop over the cube [-x, x]^3: the independent oracle for count_A."""
    top = int(math.floor(float(x)))
    rng = range(-top, top + 1)
    if policy.exact:
        m, k = _require_integral(policy, p.m, p.k)
        X = _as_fraction(x) ** (m * k)
        limit = _floor_fraction(X)  # the form is an integer
        pk = {n: abs(n) ** k for n in rng}
        pmk = {n: abs(n) ** (m * k) for n in rng}
        count = 0
        for n1 in rng:
            for n2 in rng:
                for n3 in rng:
                    if pmk[n1] + (pk[n2] + pk[n3]) ** m <= limit:
                        count += 1
        return CountResult(count, 0)
    a, m, k = p.a, p.m, p.k
    xf = float(x)
    X = xf**a
    band = policy.guard_eps * max(X, 1.0)
    g = np.abs(np.arange(-top, top + 1, dtype=float))
    n1, n2, n3 = np.meshgrid(g, g, g, indexing="ij")
    d = n1**a + (n2**k + n3**k) ** m - X
    count = int(np.count_nonzero(d < -band))
    ambiguous = 0
    for i1, i2, i3 in zip(*np.nonzero(np.abs(d) <= band)):
        u1, u2, u3 = g[i1], g[i2], g[i3]
        r = _mp_compare(lambda: mpmath.mpf(u1) ** a + (mpmath.mpf(u2) ** k + mpmath.mpf(u3) ** k) ** m,
                        lambda: mpmath.mpf(xf) ** a)
        if r is None:
            ambiguous += 1
            count += 1
        elif r:
            count += 1
    return CountResult(count, ambiguous)


def r_count(p: BodyParams, n: int) -> int:
    """#{(n1, n2, n3) : |n1|^(mk) + (|n2|^k + |n3|^k)^m = n} for integral m, k."""
    if not p.exact_mode:
        raise ValueError("r_count needs integral m and k")
    if int(n) != n or n < 0:
        raise ValueError("n must be a nonnegative integer")
    m, k, n = int(p.m), int(p.k), int(n)
    mk = m * k
    total = 0
    for n1 in range(iroot(n, mk) + 1):
        rest = n - n1**mk
        s = iroot(rest, m)
        if s**m != rest:
            continue
        pairs = 0
        for n2 in range(iroot(s, k) + 1):
            t = s - n2**k
            n3 = iroot(t, k)
            if n3**k == t:
                pairs += (1 if n2 == 0 else 2) * (1 if n3 == 0 else 2)
        total += pairs * (1 if n1 == 0 else 2)
    return total


def s_sum(p: BodyParams, x: float, policy: Optional[ScalarPolicy] = None) -> float:
    """S(x) = sum over |n2|^(mk) + |n3|^(mk) <= x^(mk) of
    ((x^(mk) - |n3|^(mk))^(1/m) - |n2|^k)^(1/k)."""
    if not x > 0:
        raise ValueError("x must be positive")
    policy = _resolve_policy(policy, p.m, p.k)
    a, m, k = p.a, p.m, p.k
    xf = float(x)
    rows = []
    top = int(math.floor(xf))
    if policy.exact:
        ai = int(m) * int(k)
        X = _as_fraction(x) ** ai
    for n3 in range(top + 1):
        if policy.exact:
            rem = X - n3**ai
            if rem < 0:
                continue
            n2max = iroot(_floor_fraction(rem), ai)
        else:
            rem_f = xf**a - float(n3) ** a
            if rem_f < 0:
                continue
            n2max = int(math.floor(rem_f ** (1.0 / a)))
        # (x^a - n3^a)^(1/m) written to avoid cancellation for n3 << x
        base = xf**k * (1.0 - (n3 / xf) ** a) ** (1.0 / m)
        n2 = np.arange(n2max + 1, dtype=float)
        terms = np.maximum(base - n2**k, 0.0) ** (1.0 / k)
        row = terms[0] + 2 * math.fsum(terms[1:])
        rows.append(row if n3 == 0 else 2 * row)
    return math.fsum(rows)
