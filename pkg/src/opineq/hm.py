"""Hoelder-McCarthy type inequalities for quadratic forms.

Notation used throughout: for a unit vector ``x``, ``p = <Phi(A)x, x>``,
``q = <Psi(B)x, x>``, ``h(s) = <Phi(A^s)x, x>`` and ``g(s) = <Psi(B^s)x, x>``.
All bounds are real scalars; the reports are scalar certifications whose
scale is the size of the ingredient forms (``p + q``), because the chain
members themselves can vanish.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .matspd import (
    DEFAULT_TOL,
    Chain,
    SlackReport,
    check_hermitian,
    frac_power,
    scalar_geq,
)
from .posmaps import PositiveMap
from .scalar_young import weight_constants

__all__ = [
    "check_unit_vector",
    "quadratic_form",
    "hm_classic",
    "hm_two_map_chain",
    "hm_mixed_chain",
    "hm_self_reverse",
    "hm_reverse_simple",
    "SimpleReverse",
]


def check_unit_vector(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1:
        raise DomainError("x must be a vector")
    if abs(np.linalg.norm(x) - 1) > 1e-12:
        raise DomainError("x must have unit norm")
    return x


def quadratic_form(M, x) -> float:
    """Real part of ``<Mx, x>``."""
    return float(np.real(np.vdot(x, M @ x)))


def _open(t):
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in the open interval (0, 1)")
    return t


def _require_unital(*maps):
    for m in maps:
        if not m.unital:
            raise DomainError(f"{m.kind} map is not unital")


def _check_out(x, *maps):
    for m in maps:
        if m.out_dim != x.shape[0]:
            raise DomainError(
                f"{m.kind} map has output dimension {m.out_dim}, x has {x.shape[0]}"
            )


def _forms(phi, A, x, exponents):
    out = {}
    for s in exponents:
        out[s] = quadratic_form(phi(frac_power(A, s)), x)
    return out


def _chain(lower, middle, upper, iid, t, scale, tol) -> Chain:
    reports = (
        scalar_geq(middle, lower, tol, inequality_id=iid, lhs_id="lower",
                   rhs_id="middle", t=t, scale=scale),
        scalar_geq(upper, middle, tol, inequality_id=iid, lhs_id="middle",
                   rhs_id="upper", t=t, scale=scale),
    )
    return Chain(lower, middle, upper, reports)


def hm_classic(T, x, t: float, *, tol: float = DEFAULT_TOL) -> SlackReport:
    """Certify ``<T^t x, x> <= <Tx, x>^t`` for ``0 <= t <= 1``."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    T = check_hermitian(T, "T")
    x = check_unit_vector(x)
    p = quadratic_form(T, x)
    return scalar_geq(
        p**t, quadratic_form(frac_power(T, t), x), tol, inequality_id="hm_classic",
        lhs_id="<T^t x,x>", rhs_id="<Tx,x>^t", t=t, dim=T.shape[0],
        scale=p**t,
    )


def _two_sided(t, p, q, mid_ab, near_a, near_b):
    # Zhao chain with a -> p, b -> q; mid_ab ~ sqrt(ab),
    # near_a ~ a^{3/4} b^{1/4}, near_b ~ a^{1/4} b^{3/4}.
    wc = weight_constants(t)
    sq = p + q - 2 * mid_ab
    corr_a = mid_ab + p - 2 * near_a
    corr_b = mid_ab + q - 2 * near_b
    if t <= 0.5:
        lower = wc.r * sq + wc.r0 * corr_a
        upper = wc.R * sq - wc.r0 * corr_b
    else:
        lower = wc.r * sq + wc.r0 * corr_b
        upper = wc.R * sq - wc.r0 * corr_a
    return lower, upper


def hm_two_map_chain(
    phi: PositiveMap, psi: PositiveMap, A, B, x, t: float, *, tol: float = DEFAULT_TOL
) -> Chain:
    """Zhao-type chain for ``(1-t)p + tq - g(t) h(1-t)`` with two unital maps.

    The square-root products are ``h(1/2) g(1/2)``, ``h(3/4) g(1/4)`` and
    ``h(1/4) g(3/4)``.
    """
    t = _open(t)
    _require_unital(phi, psi)
    x = check_unit_vector(x)
    _check_out(x, phi, psi)
    h = _forms(phi, A, x, (1.0, 0.75, 0.5, 0.25, 1 - t))
    g = _forms(psi, B, x, (1.0, 0.75, 0.5, 0.25, t))
    p, q = h[1.0], g[1.0]
    middle = (1 - t) * p + t * q - g[t] * h[1 - t]
    lower, upper = _two_sided(t, p, q, h[0.5] * g[0.5], h[0.75] * g[0.25], h[0.25] * g[0.75])
    return _chain(lower, middle, upper, "hm_two_map", t, p + q, tol)


def hm_mixed_chain(
    phi: PositiveMap, psi: PositiveMap, A, B, x, t: float, *, tol: float = DEFAULT_TOL
) -> Chain:
    """As :func:`hm_two_map_chain` with powers of ``q`` in place of ``g``."""
    t = _open(t)
    _require_unital(phi, psi)
    x = check_unit_vector(x)
    _check_out(x, phi, psi)
    h = _forms(phi, A, x, (1.0, 0.75, 0.5, 0.25, 1 - t))
    p = h[1.0]
    q = quadratic_form(psi(check_hermitian(B, "B")), x)
    middle = (1 - t) * p + t * q - q**t * h[1 - t]
    lower, upper = _two_sided(t, p, q, h[0.5] * q**0.5, h[0.75] * q**0.25, h[0.25] * q**0.75)
    return _chain(lower, middle, upper, "hm_mixed", t, p + q, tol)


def hm_self_reverse(phi: PositiveMap, A, x, t: float, *, tol: float = DEFAULT_TOL) -> Chain:
    """Two-sided bound on ``p^t - h(t)`` for a unital map.

    With ``c = p^{t-1/2}``, ``d = p^{1/2} - h(1/2)``, ``u = h(1/2) + p^{1/2}``::

        t <= 1/2:  c (2r d + r0 (u - 2 h(1/4) p^{1/4}))
                   <= p^t - h(t) <=
                   c (2R d - r0 (u - 2 h(3/4) p^{-1/4}))

    and for ``t > 1/2`` the two ``r0`` brackets trade places.
    """
    t = _open(t)
    _require_unital(phi)
    x = check_unit_vector(x)
    _check_out(x, phi)
    h = _forms(phi, A, x, (1.0, 0.75, 0.5, 0.25, t))
    p = h[1.0]
    wc = weight_constants(t)
    c = p ** (t - 0.5)
    d = p**0.5 - h[0.5]
    u = h[0.5] + p**0.5
    low_corr = u - 2 * h[0.25] * p**0.25
    high_corr = u - 2 * h[0.75] * p**-0.25
    if t > 0.5:
        low_corr, high_corr = high_corr, low_corr
    lower = c * (2 * wc.r * d + wc.r0 * low_corr)
    upper = c * (2 * wc.R * d - wc.r0 * high_corr)
    middle = p**t - h[t]
    return _chain(lower, middle, upper, "hm_self", t, p**t, tol)


class SimpleReverse(NamedTuple):
    middle: float
    bound_tight: float
    bound_loose: float
    reports: tuple
    form: float


def hm_reverse_simple(T, x, t: float, *, tol: float = DEFAULT_TOL) -> SimpleReverse:
    """Reverse of ``<T^t x, x> <= <Tx, x>^t`` for ``0 < t <= 1/2``.

    ``bound_tight`` is the upper bound of :func:`hm_self_reverse` with the
    identity map; ``bound_loose`` drops its ``<Tx,x>^{t-1/2}`` prefactor.
    The second report (tight <= loose) is only meaningful when
    ``<Tx, x> >= 1``; ``form`` carries that value for the caller.
    """
    t = float(t)
    if not 0.0 < t <= 0.5:
        raise DomainError("t must lie in (0, 1/2]")
    T = check_hermitian(T, "T")
    x = check_unit_vector(x)
    wc = weight_constants(t)
    p = quadratic_form(T, x)
    h = {s: quadratic_form(frac_power(T, s), x) for s in (0.75, 0.5, t)}
    bracket = 2 * wc.R * (p**0.5 - h[0.5]) - wc.r0 * (h[0.5] + p**0.5 - 2 * h[0.75] * p**-0.25)
    tight = p ** (t - 0.5) * bracket
    middle = p**t - h[t]
    reports = (
        scalar_geq(tight, middle, tol, inequality_id="hm_simple", lhs_id="middle",
                   rhs_id="bound_tight", t=t, dim=T.shape[0], scale=p**t),
        scalar_geq(bracket, tight, tol, inequality_id="hm_simple", lhs_id="bound_tight",
                   rhs_id="bound_loose", t=t, dim=T.shape[0], scale=p**t + p**0.5),
    )
    return SimpleReverse(middle, tight, bracket, reports, p)
