"""Ultrametric Laplace-type transform: forward map, identities, inversion.

The transform pairs a radial function against the radial step eigenfunction
of the derivative, so it is again a function of the absolute value alone
and is indexed by the exponent ``n`` of ``|xi| = q^n``.  On the shell level
it reads

    transform(q^n) = (1 - 1/q) sum_{j <= -n} phi(q^j) q^j - phi(q^(-n+1)) q^(-n),

which yields a two-term difference identity linking consecutive transform
values to consecutive function values, and through it exact inversion once
the value at radius one is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .field import FieldParams, KRadialFunction, _sum_exp_upto
from .operators import apply_D_alpha

__all__ = [
    "TransformSequence",
    "laplace_transform",
    "difference_identity_residual",
    "laplace_invert",
    "symbol_identity_residual",
]


@dataclass(frozen=True, eq=False)
class TransformSequence:
    """Transform values on the exponent range ``[n_lo, n_hi]``."""

    params: FieldParams
    n_lo: int
    n_hi: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size != self.n_hi - self.n_lo + 1:
            raise ValueError(
                f"values must have length {self.n_hi - self.n_lo + 1}, got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def value_at(self, n: int) -> complex:
        if not self.n_lo <= n <= self.n_hi:
            raise ValueError(f"transform value at n={n} not computed (range [{self.n_lo}, {self.n_hi}])")
        return complex(self.values[n - self.n_lo])


def laplace_transform(phi: KRadialFunction, n_range: tuple[int, int]) -> TransformSequence:
    """Transform of ``phi`` on an inclusive exponent range.

    Only values of ``phi`` on shells ``j <= -n + 1`` enter the value at
    ``q^n``; the constant inner tail closes the downward series, and values
    above the window are zero by representation, so every computed value is
    exact for the represented function.
    """
    lo, hi = n_range
    if lo > hi:
        raise ValueError(f"empty transform range {n_range}")
    q = float(phi.params.q)
    out = np.empty(hi - lo + 1, dtype=complex)
    for i, n in enumerate(range(lo, hi + 1)):
        s = 0j
        k_hi = min(-n, phi.n_hi)
        if k_hi >= phi.n_lo:
            ks = np.arange(phi.n_lo, k_hi + 1)
            s += np.sum(phi.values[ks - phi.n_lo] * np.power(q, ks.astype(float)))
        J = min(-n, phi.n_lo - 1)
        s += phi.inner_tail * _sum_exp_upto(J, q)
        out[i] = (1.0 - 1.0 / q) * s - phi.value_at(-n + 1) * q ** float(-n)
    return TransformSequence(phi.params, lo, hi, out)


def difference_identity_residual(phi: KRadialFunction, n_range: tuple[int, int]) -> float:
    """Largest violation of the two-term difference identity on the range."""
    lo, hi = n_range
    tilde = laplace_transform(phi, (lo, hi + 1))
    q = float(phi.params.q)
    worst = 0.0
    for n in range(lo, hi + 1):
        lhs = tilde.value_at(n) - tilde.value_at(n + 1)
        rhs = q ** float(-n) * (phi.value_at(-n) - phi.value_at(-n + 1))
        worst = max(worst, abs(lhs - rhs))
    return worst


def laplace_invert(
    tilde: TransformSequence, phi_at_1: complex, m_max: int
) -> tuple[np.ndarray, np.ndarray]:
    """Recover shell values of ``phi`` from its transform.

    Returns ``(down, up)`` with ``down[m-1] = phi(q^-m)`` and
    ``up[m-1] = phi(q^m)`` for ``m = 1 .. m_max``.  The cumulative sums
    anchor at the supplied ``phi_at_1`` (the transform alone determines
    ``phi`` only up to an additive constant).  The outward recursion needs
    transform values on ``[1 - m_max, 1]`` and the inward one on
    ``[1, m_max + 1]``.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    need_lo, need_hi = 1 - m_max, m_max + 1
    missing = [n for n in range(need_lo, need_hi + 1) if not tilde.n_lo <= n <= tilde.n_hi]
    if missing:
        raise ValueError(
            f"transform range [{tilde.n_lo}, {tilde.n_hi}] is missing indices {missing[0]}..{missing[-1]} "
            f"needed for m_max={m_max}"
        )
    q = float(tilde.params.q)
    up = np.empty(m_max, dtype=complex)
    acc = complex(phi_at_1)
    for m in range(1, m_max + 1):
        j = m - 1
        acc += q ** float(-j) * (tilde.value_at(-j + 1) - tilde.value_at(-j))
        up[m - 1] = acc
    down = np.empty(m_max, dtype=complex)
    acc = complex(phi_at_1)
    for m in range(1, m_max + 1):
        acc += q ** float(m) * (tilde.value_at(m) - tilde.value_at(m + 1))
        down[m - 1] = acc
    return down, up


def symbol_identity_residual(
    phi: KRadialFunction, alpha: float, n_range: tuple[int, int], relative: bool = False
) -> float:
    """Largest violation of: transform of the derivative = symbol * transform.

    ``phi`` must be finitely supported (zero tail) so the derivative can be
    evaluated on a widened window; the transform of the derivative at
    ``q^n`` only reads shells ``j <= -n + 1``, which that window covers
    exactly.  With ``relative=True`` each gap is divided by the larger side
    once that exceeds 1; the symbol reaches ``q^(alpha n)``, so on wide
    ranges the absolute gap carries that factor on top of rounding.
    """
    if phi.inner_tail != 0:
        raise ValueError("symbol identity check requires a zero-tail function")
    lo, hi = n_range
    p_alpha = replace(phi.params, alpha=float(alpha))
    phi_a = KRadialFunction(p_alpha, phi.n_lo, phi.n_hi, phi.values, 0j)
    out_hi = max(phi.n_hi, 1 - lo)
    dphi = apply_D_alpha(phi_a, (phi.n_lo, out_hi))
    lhs = laplace_transform(dphi, n_range)
    rhs = laplace_transform(phi_a, n_range)
    q = float(phi.params.q)
    worst = 0.0
    for n in range(lo, hi + 1):
        left = lhs.value_at(n)
        right = q ** (float(alpha) * n) * rhs.value_at(n)
        gap = abs(left - right)
        if relative:
            gap /= max(1.0, abs(left), abs(right))
        worst = max(worst, gap)
    return worst
