"""Discrepancy records, the remainder-exponent table and growth fits."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .lattice_count import AmbiguityError, BodyParams, ScalarPolicy, count_A, s_sum
from .special_fn import FULL_SERIES, MainTermParams, SeriesConfig, body_volume, main_term, main_term_tail

CSV_HEADER = ("x", "A", "vol_term", "H1", "H2", "P", "R")


def fmt(v) -> str:
    """15 significant digits, locale independent."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".15g")


@dataclass(frozen=True)
class DiscrepancyRecord:
    x: float
    A: int
    vol_term: float
    H1: float
    H2: float
    P: float
    R: float
    h_tail: float = 0.0

    @classmethod
    def assemble(cls, x: float, A: int, vol_term: float, H1: float, H2: float,
                 h_tail: float = 0.0) -> "DiscrepancyRecord":
        P = A - vol_term
        return cls(x, A, vol_term, H1, H2, P, P - H1 - H2, h_tail)

    def csv_row(self) -> list:
        return [fmt(getattr(self, f)) for f in CSV_HEADER]


def main_terms(p: BodyParams, x: float, cfg: SeriesConfig = FULL_SERIES,
               mode: str = "asymptotic") -> tuple:
    """(H1, H2, tail) for the body, i.e. H_{mk,k,1}(x), H_{mk,k,2}(x)."""
    mp = MainTermParams(p.a, p.k)
    h1 = main_term(mp, x, 1, mode, cfg)
    h2 = main_term(mp, x, 2, mode, cfg)
    tail = main_term_tail(mp, x, 1, cfg) + main_term_tail(mp, x, 2, cfg)
    return h1, h2, tail


def discrepancy_record(p: BodyParams, x: float, policy: Optional[ScalarPolicy] = None,
                       cfg: SeriesConfig = FULL_SERIES, mode: str = "asymptotic") -> DiscrepancyRecord:
    p.check_asymptotic_range()
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    res = count_A(p, x, policy)
    if res.ambiguous:
        raise AmbiguityError(f"{res.ambiguous} undecided boundary points at x={x}")
    h1, h2, tail = main_terms(p, x, cfg, mode)
    return DiscrepancyRecord.assemble(x, res.count, body_volume(p) * x**3, h1, h2, tail)


class ExponentVerdict(NamedTuple):
    case_id: int
    exponent: float
    log_power: float


K_SPLIT = Fraction(5875, 779)
MK_SPLIT = Fraction(6550, 779)
M_SPLIT = Fraction(262, 235)


def classify_exponent(p: BodyParams) -> ExponentVerdict:
    """Remainder exponent of A_{m,k}(x) - vol x^3 - H1 - H2 by parameter case.

    Comparisons use the exact rational value of the given floats, so boundary
    parameters follow the printed < / >= conventions.
    """
    m, k = Fraction(p.m), Fraction(p.k)
    mk = m * k
    if not (m > 1 and k > 2 and mk >= Fraction(7, 3)):
        raise ValueError(f"need m > 1, k > 2, mk >= 7/3, got m={p.m}, k={p.k}")
    a = float(mk)
    if k < K_SPLIT and mk < MK_SPLIT:
        return ExponentVerdict(1, 37 / 25, 0.0)
    if mk >= MK_SPLIT and m >= M_SPLIT:
        return ExponentVerdict(2, 339 / 208 - 131 / (104 * a), (18627 * a - 20614) / (8320 * a))
    if k >= K_SPLIT and m < M_SPLIT:
        kf = float(k)
        return ExponentVerdict(3, 339 / 208 - 235 / (208 * kf), 18627 / 8320 * (1 - 1 / kf))
    raise AssertionError("case table does not cover this point")  # unreachable: the cases partition


def proposition_check(p: BodyParams, x: float, policy: Optional[ScalarPolicy] = None,
                         cfg: SeriesConfig = FULL_SERIES, mode: str = "asymptotic") -> float:
    """S(x) - vol x^3/2 - H1/2 - H2/4."""
    p.check_asymptotic_range()
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    h1, h2, _ = main_terms(p, x, cfg, mode)
    return s_sum(p, x, policy) - 0.5 * body_volume(p) * x**3 - 0.5 * h1 - 0.25 * h2


class SweepError(RuntimeError):
    pass


def _row(x, p, policy, cfg):
    try:
        return discrepancy_record(p, x, policy, cfg)
    except Exception as exc:
        raise SweepError(f"row x={x!r} failed: {exc}") from exc


def check_grid(grid: Sequence[float]) -> list:
    xs = [float(v) for v in grid]
    if not xs:
        raise ValueError("empty grid")
    if any(not (v > 0 and math.isfinite(v)) for v in xs):
        raise ValueError("grid points must be positive and finite")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("grid must be strictly increasing")
    return xs


def sweep(p: BodyParams, grid: Sequence[float], policy: Optional[ScalarPolicy] = None,
          cfg: SeriesConfig = FULL_SERIES, workers: int = 1) -> list:
    """One record per grid point, in grid order whatever the worker count."""
    xs = check_grid(grid)
    p.check_asymptotic_range()
    job = partial(_row, p=p, policy=policy, cfg=cfg)
    if workers <= 1 or len(xs) == 1:
        return [job(x) for x in xs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, xs))


class FitResult(NamedTuple):
    slope: float
    intercept: float
    used: int
    dropped: int


def fit_exponent(records: Sequence, field: str = "R", zero_tol: float = 1e-9) -> FitResult:
    """Least-squares slope of log|field| against log x.

    Rows with |field| < zero_tol (sign changes) are dropped and counted.
    """
    if field not in ("P", "R"):
        raise ValueError(f"field must be 'P' or 'R', got {field!r}")
    if len(records) < 10:
        raise ValueError("need at least 10 records")
    x = np.array([r.x for r in records], dtype=float)
    if x.max() / x.min() < 10:
        raise ValueError("x range must span at least one decade")
    y = np.abs(np.array([getattr(r, field) for r in records], dtype=float))
    keep = y >= zero_tol
    if keep.sum() < 10:
        raise ValueError(f"only {int(keep.sum())} usable rows after dropping zero crossings")
    slope, intercept = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return FitResult(float(slope), float(intercept), int(keep.sum()), int((~keep).sum()))


def rms(values) -> float:
    v = np.asarray(list(values), dtype=float)
    return float(np.sqrt(np.mean(v**2)))
