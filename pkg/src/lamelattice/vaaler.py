"""Trigonometric approximation of the sawtooth with a cosine majorant.

For an order H > 1 the sine polynomial ``psi_H`` approximates
psi(w) = w - floor(w) - 1/2 and the cosine polynomial ``psi_H*`` controls the
error:  |psi(w) - psi_H(w)| <= psi_H*(w) + 1/(2H).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_fn import DomainError



def sawtooth(w):
    """psi(w) = w - floor(w) - 1/2, in [-1/2, 1/2); works elementwise."""
    if np.ndim(w) == 0:
        w = float(w)
        return w - math.floor(w) - 0.5
    w = np.asarray(w, dtype=float)
    return w - np.floor(w) - 0.5


# 2^(2n) |B_2n| / (2n)!, the coefficients of 1 - u cot u
_UCOT = (1 / 3, 1 / 45, 2 / 945, 1 / 4725, 2 / 93555, 1382 / 638512875, 4 / 18243225)


def _one_minus_ucot(u: float) -> float:
    """1 - u cot(u) without cancellation for small u."""
    if u < 0.25:
        u2 = u * u
        return u2 * sum(c * u2**i for i, c in enumerate(_UCOT))
    return 1.0 - u / math.tan(u)


def rho(xi: float) -> float:
    """pi xi (1 - xi) cot(pi xi) + xi on 0 < xi < 1.

    Tends to 1 at 0+ and to 0 at 1-.  Above 1/2 it is rewritten as
    xi (1 - u cot u) with u = pi (1 - xi), which keeps full relative accuracy.
    """
    if not (0.0 < xi < 1.0):
        raise DomainError(f"rho needs 0 < xi < 1, got {xi}")
    if xi <= 0.5:
        u = math.pi * xi
        return (1.0 - xi) * (1.0 - _one_minus_ucot(u)) + xi
    return xi * _one_minus_ucot(math.pi * (1.0 - xi))


@dataclass(frozen=True)
class VaalerApprox:
    H: int
    kind: str
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.H - 1:
            raise ValueError("need H - 1 coefficients")

    def __call__(self, w):
        return vaaler_eval(self, w)


def alpha_coeff(h: int, H: int) -> float:
    return rho(h / H) / (math.pi * h)


def beta_coeff(h: int, H: int) -> float:
    return (1.0 - h / H) / H


def build_vaaler(H: int, kind: str) -> VaalerApprox:
    if int(H) != H or H < 2:
        raise ValueError(f"order H must be an integer >= 2, got {H!r}")
    H = int(H)
    if kind == "alpha":
        coeffs = tuple(alpha_coeff(h, H) for h in range(1, H))
    elif kind == "beta":
        coeffs = tuple(beta_coeff(h, H) for h in range(1, H))
    else:
        raise ValueError(f"kind must be 'alpha' or 'beta', got {kind!r}")
    return VaalerApprox(H, kind, coeffs)


def vaaler_eval(v: VaalerApprox, w):
    """psi_H(w) for alpha coefficients, psi_H*(w) for beta; elementwise in w."""
    scalar = np.ndim(w) == 0
    w = np.atleast_1d(np.asarray(w, dtype=float))
    # reduce first: the polynomial is 1-periodic and large w loses phase
    frac = w - np.floor(w)
    h = np.arange(1, v.H)
    arg = 2 * math.pi * np.outer(frac, h)
    c = np.asarray(v.coeffs)
    if v.kind == "alpha":
        out = -(np.sin(arg) @ c)
    else:
        out = np.cos(arg) @ c
    return float(out[0]) if scalar else out


def majorant_violations(H: int, w) -> int:
    """Number of w where |psi - psi_H| > psi_H* + 1/(2H) + 1e-12."""
    a = build_vaaler(H, "alpha")
    b = build_vaaler(H, "beta")
    w = np.asarray(w, dtype=float)
    lhs = np.abs(sawtooth(w) - vaaler_eval(a, w))
    rhs = vaaler_eval(b, w) + 1.0 / (2 * H) + 1e-12
    return int(np.count_nonzero(lhs > rhs))
