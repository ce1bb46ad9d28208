"""Integral and pseudo-differential operators acting on shell functions.

All operators reduce to shell sums with geometric tails handled in closed
form, so every output value is exact up to rounding.  The fractional
derivative acts on functions over the whole field; the integration
operators act on functions supported on the unit ball and, where the
output fails to be representable with a constant tail, the limit value at
the origin is attached as the tail instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .field import (
    FieldParams,
    KRadialFunction,
    _require_o,
    _sum_exp_upto,
    _sum_j_exp_upto,
    expand,
    make_basis,
    o_integral,
    o_log_integral,
)

__all__ = [
    "apply_D_alpha",
    "apply_D_alpha_O",
    "apply_I_alpha",
    "apply_I01",
    "apply_resolvent_D1O",
    "OperatorMatrix",
    "operator_matrix",
    "MomentTable",
    "moment_table",
    "d_constant",
    "moment_a",
    "moment_b",
    "moment_m0",
    "OPERATOR_NAMES",
]

OPERATOR_NAMES = ("D1O", "I1", "I01", "J", "resolvent")


def apply_D_alpha(
    u: KRadialFunction, out_window: tuple[int, int] | None = None
) -> KRadialFunction:
    """Fractional derivative of order ``alpha`` on a radial function.

    The value on the shell ``q^n`` combines a downward sum weighted by
    ``q^k``, a diagonal term, and an upward sum weighted by ``q^(-alpha l)``.
    Constants are annihilated, so the formula is evaluated on the deviation
    ``u - t`` from the inner tail: the deviation vanishes below the window
    and equals ``-t`` above it (closed-form geometric stretch), which keeps
    every term at the scale of the result.  (Evaluating the three terms on
    ``u`` directly is exact too, but their ``q^(-alpha n)`` growth toward the
    origin cancels catastrophically on shells below the structure.)  The
    output is constant below the input window, and that constant becomes the
    output tail, so the result is exact.

    ``out_window`` defaults to the input window and must not start above it
    (otherwise the constant-tail representation of the output would be
    wrong).
    """
    p = u.params
    q = float(p.q)
    a = p.alpha
    if out_window is None:
        out_window = (u.n_lo, u.n_hi)
    lo, hi = out_window
    if lo > hi:
        raise ValueError(f"empty output window {out_window}")
    if lo > u.n_lo:
        raise ValueError(
            f"output window must start at or below the input window ({lo} > {u.n_lo})"
        )

    theta = p.theta_alpha
    unit = 1.0 - 1.0 / q
    diag_c = (q**a + q - 2.0) / (1.0 - q ** (-a - 1.0))
    t = u.inner_tail
    ks = np.arange(u.n_lo, u.n_hi + 1)
    dev = u.values - t  # deviation on the window; zero below, -t above

    out = np.empty(hi - lo + 1, dtype=complex)
    for i, n in enumerate(range(lo, hi + 1)):
        down = 0j
        k_hi = min(n - 1, u.n_hi)
        if k_hi >= u.n_lo:
            sel = ks <= k_hi
            down += np.sum(np.power(q, ks[sel].astype(float)) * dev[sel])
        if n - 1 > u.n_hi:  # the -t stretch between the window top and n
            down -= t * (q ** float(n) - q ** (u.n_hi + 1.0)) / (q - 1.0)

        up = 0j
        l_lo = max(n + 1, u.n_lo)
        if l_lo <= u.n_hi:
            sel = ks >= l_lo
            up += np.sum(np.power(q, -a * ks[sel].astype(float)) * dev[sel])
        L0 = max(n + 1, u.n_hi + 1)
        up -= t * q ** (-a * L0) / (1.0 - q ** (-a))

        w_n = (u.value_at(n) - t) if n <= u.n_hi else -t
        diag = q ** (-a * n - 1.0) * diag_c * w_n
        out[i] = theta * unit * q ** (-(a + 1.0) * n) * down + diag + theta * unit * up

    # below the input window the derivative is the constant
    #   theta (1-1/q) sum_{l >= n_lo} q^(-alpha l) (u(q^l) - t)
    tail = theta * unit * (
        np.sum(np.power(q, -a * ks.astype(float)) * dev)
        - t * q ** (-a * (u.n_hi + 1.0)) / (1.0 - q ** (-a))
    )
    return KRadialFunction(p, lo, hi, out, tail)


def apply_D_alpha_O(u: KRadialFunction) -> KRadialFunction:
    """Derivative of the zero extension, restricted back to the unit ball.

    Values above the top shell are zero by representation, which is exactly
    the zero extension, so this is the derivative evaluated on shells
    ``j <= 0``.
    """
    _require_o(u, "apply_D_alpha_O")
    return apply_D_alpha(u, (u.n_lo, 0))


def apply_I_alpha(u: KRadialFunction, out_hi: int = 0) -> KRadialFunction:
    """Right inverse of the fractional derivative, on ball-supported input.

    The diagonal term ``q^-alpha |x|^alpha u(|x|)`` plus the kernel integral
    over ``|y| < |x|``; the constant tail closes the downward kernel sums as
    geometric series.  Below the input window the input is constant in every
    shell the integral sees, and constants are annihilated, so the output
    tail is exactly zero.  With ``out_hi > 0`` the same formulas produce the
    values on shells outside the ball (needed to compose with the derivative
    over the whole field).

    The order ``alpha = 1`` is dispatched by exact comparison to the
    logarithmic kernel; the power kernel has a pole there and is never used
    for it.
    """
    _require_o(u, "apply_I_alpha")
    p = u.params
    q = float(p.q)
    a = p.alpha
    t = u.inner_tail
    lo = u.n_lo
    if out_hi < 0:
        raise ValueError("out_hi must be >= 0")

    unit = 1.0 - 1.0 / q
    out = np.empty(out_hi - lo + 1, dtype=complex)
    ks = np.arange(u.n_lo, u.n_hi + 1)
    mus = unit * np.power(q, ks.astype(float))
    if a == 1.0:
        c = p.c_volterra
        lnq = p.ln_q
        for i, n in enumerate(range(lo, out_hi + 1)):
            sel = ks <= n - 1
            ker = np.sum((n - ks[sel]) * lnq * u.values[sel] * mus[sel])
            J = min(n - 1, u.n_lo - 1)
            ker += t * lnq * unit * (n * _sum_exp_upto(J, q) - _sum_j_exp_upto(J, q))
            out[i] = q ** (n - 1.0) * u.value_at(n) + c * ker
    else:
        pre = (1.0 - q ** (-a)) / (1.0 - q ** (a - 1.0))
        for i, n in enumerate(range(lo, out_hi + 1)):
            sel = ks <= n - 1
            ker = np.sum(
                (q ** (n * (a - 1.0)) - np.power(q, (a - 1.0) * ks[sel].astype(float)))
                * u.values[sel]
                * mus[sel]
            )
            J = min(n - 1, u.n_lo - 1)
            ker += t * unit * (
                q ** (n * (a - 1.0)) * _sum_exp_upto(J, q) - _sum_exp_upto(J, q, a)
            )
            out[i] = q ** (-a) * q ** (a * n) * u.value_at(n) + pre * ker
    return KRadialFunction(p, lo, out_hi, out)


def apply_I01(u: KRadialFunction, out_lo: int | None = None) -> KRadialFunction:
    """Volterra part of the order-one integral: logarithmic kernel only.

    The kernel weight on the shell pair ``(n, j)``, ``j < n``, is
    ``c (n - j) log q`` times the shell measure.  Acting on the constant 1
    the output is ``-|x|/q``, so for input with tail ``t`` the true values
    below ``out_lo`` decay like ``-t q^(n-1)``; the stored tail is their
    limit 0, exact whenever ``t = 0``.
    """
    _require_o(u, "apply_I01")
    p = u.params
    q = float(p.q)
    c = p.c_volterra
    lnq = p.ln_q
    unit = 1.0 - 1.0 / q
    lo = u.n_lo if out_lo is None else out_lo
    if lo > 0:
        raise ValueError("out_lo must be <= 0")

    t = u.inner_tail
    ks = np.arange(u.n_lo, u.n_hi + 1)
    mus = unit * np.power(q, ks.astype(float))
    out = np.empty(1 - lo, dtype=complex)
    for i, n in enumerate(range(lo, 1)):
        sel = ks <= n - 1
        ker = np.sum((n - ks[sel]) * lnq * u.values[sel] * mus[sel])
        J = min(n - 1, u.n_lo - 1)
        # tail: c log q (1-1/q) t sum_{j <= J} (n - j) q^j
        ker += t * lnq * unit * (n * _sum_exp_upto(J, q) - _sum_j_exp_upto(J, q))
        out[i] = c * ker
    return KRadialFunction(p, lo, 0, out)


def _log_kernel(params: FieldParams, m: int) -> float:
    """Resolvent kernel value on the shell ``q^m``: ``c m log q - 1/q``."""
    return params.c_volterra * m * params.ln_q - 1.0 / params.q


def _log_kernel_ball_integral(params: FieldParams, J: int) -> float:
    """Integral of the resolvent kernel over the ball ``|x| <= q^J``."""
    q = float(params.q)
    c = params.c_volterra
    return (
        c * params.ln_q * (1.0 - 1.0 / q) * _sum_j_exp_upto(J, q)
        - (1.0 / q) * q ** float(J)
    )


def apply_resolvent_D1O(u: KRadialFunction) -> KRadialFunction:
    """Inverse of the order-one derivative on the unit ball.

    Radial convolution with the logarithmic kernel plus the projection term
    with the inverse first eigenvalue ``(q+1)/q``.  Off the equal-radius
    shell the ultrametric gives ``|x - xi| = max(|x|, |xi|)``; on it the
    difference sweeps the sub-shells with measure ``(1-1/q) q^m`` below and
    ``(1-2/q) q^n`` on the shell itself (zero when q = 2, a valid degenerate
    case).  Below the input window the output is constant; it is evaluated
    once at ``n_lo - 1`` and stored as the tail, which realizes the value at
    the origin.
    """
    _require_o(u, "apply_resolvent_D1O")
    p = u.params
    if p.alpha != 1.0:
        raise ValueError("the resolvent is defined for alpha = 1 only")
    q = float(p.q)
    unit = 1.0 - 1.0 / q
    mu0_inv = (q + 1.0) / q

    ks = np.arange(u.n_lo, 1)
    vals = u.values_on(u.n_lo, 0)
    mus = unit * np.power(q, ks.astype(float))
    total = np.sum(vals * mus) + u.inner_tail * q ** (u.n_lo - 1.0)

    def at(n: int) -> complex:
        # |xi| > |x|
        above = 0j
        if n + 1 <= 0:
            sel = ks >= n + 1
            kker = np.array([_log_kernel(p, int(b)) for b in ks[sel]])
            above = np.sum(kker * vals[sel] * mus[sel])
        # |xi| < |x|, kernel frozen at |x|
        if n - 1 >= u.n_lo:
            sel = ks <= n - 1
            below_mass = np.sum(vals[sel] * mus[sel]) + u.inner_tail * q ** (u.n_lo - 1.0)
        else:
            below_mass = u.inner_tail * q ** (n - 1.0)
        below = _log_kernel(p, n) * below_mass
        # |xi| = |x|: sub-shell decomposition
        onshell = (
            _log_kernel_ball_integral(p, n - 1)
            + _log_kernel(p, n) * (1.0 - 2.0 / q) * q ** float(n)
        ) * u.value_at(n)
        return above + below + onshell + mu0_inv * total

    out = np.array([at(n) for n in range(u.n_lo, 1)], dtype=complex)
    tail = at(u.n_lo - 1)
    return KRadialFunction(p, u.n_lo, 0, out, tail)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix of an operator in the e- or f-family at a truncation.

    ``entries[j, n]`` is the coefficient of basis element ``j`` in the image
    of basis element ``n``.
    """

    params: FieldParams
    name: str
    basis: str
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=complex)
        if ent.shape != (self.dim, self.dim):
            raise ValueError(f"entries must be {self.dim}x{self.dim}, got {ent.shape}")
        ent = ent.copy()
        ent.flags.writeable = False
        object.__setattr__(self, "entries", ent)


def _j_entries(params: FieldParams, basis: str, dim: int) -> np.ndarray:
    """Imaginary part as a rank-2 matrix from the pairings with 1 and log."""
    q = float(params.q)
    kap = (1.0 - q) / (2j * q * params.ln_q)
    ones = np.empty(dim)
    logs = np.empty(dim)
    for k in range(dim):
        b = make_basis(params, basis, k)
        ones[k] = o_integral(b).real
        logs[k] = o_log_integral(b).real
    return kap * (np.outer(logs, ones) - np.outer(ones, logs))


def operator_matrix(params: FieldParams, name: str, basis: str, dim: int) -> OperatorMatrix:
    """Matrix of one of the order-one operators in the e- or f-family.

    Columns are built by applying the operator to exact basis vectors and
    expanding the image, which keeps entries at closed-form accuracy.  All
    five named operators are order-one objects, so the matrix is formed at
    ``alpha = 1`` regardless of the ``alpha`` stored in ``params``.
    """
    if name not in OPERATOR_NAMES:
        raise ValueError(f"unknown operator {name!r}, expected one of {OPERATOR_NAMES}")
    if basis not in ("e", "f"):
        raise ValueError(f"basis must be 'e' or 'f', got {basis!r}")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    p1 = replace(params, alpha=1.0)
    if name == "J":
        return OperatorMatrix(p1, name, basis, dim, _j_entries(p1, basis, dim))

    ops = {
        "D1O": apply_D_alpha_O,
        "I1": apply_I_alpha,
        "I01": apply_I01,
        "resolvent": apply_resolvent_D1O,
    }
    op = ops[name]
    cols = np.empty((dim, dim), dtype=complex)
    for n in range(dim):
        image = op(make_basis(p1, basis, n))
        cols[:, n] = expand(image, basis, dim)
    return OperatorMatrix(p1, name, basis, dim, cols)


def d_constant(params: FieldParams, m: int) -> float:
    """Coefficient in the shift identity: integrating the logarithmic kernel
    against ``|y|^m`` over ``|y| < |x|`` gives ``d_m |x|^(m+1)``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    q = float(params.q)
    y = q ** (-(m + 1.0))
    return (1.0 - 1.0 / q) * params.ln_q * y / (1.0 - y) ** 2


def moment_a(params: FieldParams, n: int) -> float:
    """Integral of ``|t|^n log|t|`` over ``|t| < 1`` (negative)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return -d_constant(params, n)


def moment_b(params: FieldParams, n: int) -> float:
    """Integral of ``|t|^n log^2|t|`` over ``|t| < 1`` (positive)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    q = float(params.q)
    y = q ** (-(n + 1.0))
    return (1.0 - 1.0 / q) * params.ln_q**2 * y * (1.0 + y) / (1.0 - y) ** 3


def moment_m0(params: FieldParams, n: int) -> float:
    """Integral of ``|t|^n`` over the unit ball."""
    if n < 0:
        raise ValueError("n must be >= 0")
    q = float(params.q)
    return (1.0 - 1.0 / q) / (1.0 - q ** (-(n + 1.0)))


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Cached moment sequences used by the iterated integration operator."""

    params: FieldParams
    d: np.ndarray
    a: np.ndarray
    b: np.ndarray
    m0: np.ndarray


def moment_table(params: FieldParams, count: int) -> MomentTable:
    idx = range(count)
    return MomentTable(
        params,
        np.array([d_constant(params, m) for m in idx]),
        np.array([moment_a(params, n) for n in idx]),
        np.array([moment_b(params, n) for n in idx]),
        np.array([moment_m0(params, n) for n in idx]),
    )
