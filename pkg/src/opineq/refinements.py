"""Operator Young refinements and reverses.

Each function evaluates one bound for positive-definite ``A`` and ``B`` and
certifies it in the Loewner order.  The weight convention is that of the
geometric mean: ``A #_t B`` is the operator analogue of ``a**(1-t) b**t`` and
``A nabla_t B = (1-t) A + t B``.

The two series helpers take a callable ``mean(s)`` returning ``A #_s B``
(or its image under a positive map), so the same assembly serves the
plain bounds here and the mapped versions in :mod:`opineq.posmaps`.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .matspd import (
    DEFAULT_TOL,
    Certified,
    Chain,
    GeodesicPath,
    frac_power,
    loewner_geq,
)
from .scalar_young import RefinementSchedule, refinement_schedule, weight_constants

__all__ = [
    "DEFAULT_N",
    "lower_series",
    "upper_series",
    "kittaneh_chain",
    "kittaneh_raw_product_departure",
    "sababheh_lower",
    "sababheh_upper",
    "zhao_lower_n2",
    "zhao_upper_n2",
]

DEFAULT_N = 4

Mean = Callable[[float], np.ndarray]


def _closed_weight(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    return t


def _open_weight(t: float) -> float:
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in the open interval (0, 1)")
    return t


def _branch(t: float, branch: Optional[str]) -> str:
    if branch is None:
        return "i" if t <= 0.5 else "ii"
    if branch not in ("i", "ii"):
        raise DomainError(f"unknown branch {branch!r}")
    return branch


def _path(A, B, path: Optional[GeodesicPath]) -> GeodesicPath:
    return path if path is not None else GeodesicPath(A, B)


def _second_difference(mean: Mean, lo: float, step: float) -> np.ndarray:
    # mean(lo) + mean(lo + step) - 2 mean(lo + step/2)
    return mean(lo) + mean(lo + step) - 2 * mean(lo + step / 2)


def lower_series(mean: Mean, sched: RefinementSchedule) -> np.ndarray:
    """``sum_j s_j(t) (M(a_j) + M(a_j + 2^{1-j}) - 2 M(a_j + 2^{-j}))``."""
    total = None
    for j, (s, alpha) in enumerate(zip(sched.s, sched.alpha), start=1):
        if s == 0:
            continue
        term = s * _second_difference(mean, alpha, 2.0 ** (1 - j))
        total = term if total is None else total + term
    if total is None:
        total = 0 * mean(0.0)
    return total


def upper_series(mean: Mean, sched: RefinementSchedule, branch: str) -> np.ndarray:
    """Correction subtracted from the reverse bound.

    Branch ``"i"`` sums ``s_j(2t)`` times the second difference at exponents
    ``1 - beta_j``, ``1 - 2^{-j} - beta_j`` (midpoint ``1 - 2^{-j-1} - beta_j``);
    branch ``"ii"`` sums ``s_j(2-2t)`` times the one at ``gamma_j / 2``,
    ``gamma_j / 2 + 2^{-j}``.
    """
    total = None
    if branch == "i":
        weights, starts = sched.s_double, [1.0 - b for b in sched.beta]
        sign = -1.0
    else:
        weights, starts = sched.s_reflect, [g / 2 for g in sched.gamma]
        sign = 1.0
    for j, (s, lo) in enumerate(zip(weights, starts), start=1):
        if s == 0:
            continue
        term = s * _second_difference(mean, lo, sign * 2.0**-j)
        total = term if total is None else total + term
    if total is None:
        total = 0 * mean(0.0)
    return total


def kittaneh_chain(A, B, t: float, *, tol: float = DEFAULT_TOL, path=None) -> Chain:
    """``A#_tB + r(A+B-2A#B) <= A nabla_t B <= A#_tB + R(A+B-2A#B)``."""
    t = _closed_weight(t)
    p = _path(A, B, path)
    wc = weight_constants(t)
    g = p.at(t)
    gap = p.A + p.B - 2 * p.at(0.5)
    lower = g + wc.r * gap
    middle = (1 - t) * p.A + t * p.B
    upper = g + wc.R * gap
    reports = (
        loewner_geq(middle, lower, tol, inequality_id="kitt",
                    lhs_id="lower", rhs_id="middle", t=t),
        loewner_geq(upper, middle, tol, inequality_id="kitt",
                    lhs_id="middle", rhs_id="upper", t=t),
    )
    return Chain(lower, middle, upper, reports)


def kittaneh_raw_product_departure(A, B, t: float) -> float:
    """Relative skew-Hermitian part of the raw product ``A**(1-t) B**t``.

    Zero exactly when the product is Hermitian (e.g. commuting inputs); the
    product form is not order-comparable otherwise.
    """
    t = _closed_weight(t)
    X = frac_power(A, 1 - t) @ frac_power(B, t)
    return float(np.linalg.norm(X - X.conj().T, 2) / np.linalg.norm(X, 2))


def sababheh_lower(
    A, B, t: float, N: int = DEFAULT_N, *, tol: float = DEFAULT_TOL, path=None
) -> Certified:
    """N-term refinement of ``A#_tB <= A nabla_t B``.

    Returns the refinement term; the report certifies
    ``refinement + A#_tB <= A nabla_t B``.
    """
    t = _closed_weight(t)
    p = _path(A, B, path)
    sched = refinement_schedule(t, N)
    term = lower_series(p.at, sched)
    report = loewner_geq(
        (1 - t) * p.A + t * p.B, term + p.at(t), tol,
        inequality_id="sab_lower", lhs_id="refinement+geometric",
        rhs_id="arithmetic", t=t,
    )
    return Certified(term, report)


def sababheh_upper(
    A,
    B,
    t: float,
    N: int = DEFAULT_N,
    *,
    branch: Optional[str] = None,
    tol: float = DEFAULT_TOL,
    path=None,
) -> Certified:
    """N-term reverse: ``A nabla_t B <= bound``.

    ``bound = A#_tB + 2R(A nabla B - A#B) - correction`` where ``2R`` is
    ``2(1-t)`` on branch ``"i"`` (``t <= 1/2``) and ``2t`` on branch ``"ii"``.
    Both branches are valid at ``t = 1/2``; ``branch`` forces one.
    """
    t = _closed_weight(t)
    br = _branch(t, branch)
    p = _path(A, B, path)
    sched = refinement_schedule(t, N)
    coef = 2 * (1 - t) if br == "i" else 2 * t
    head = p.at(t) + coef * ((p.A + p.B) / 2 - p.at(0.5))
    bound = head - upper_series(p.at, sched, br)
    report = loewner_geq(
        bound, (1 - t) * p.A + t * p.B, tol, inequality_id="sab_upper",
        lhs_id="arithmetic", rhs_id="bound", t=t,
    )
    return Certified(bound, report)


def _zhao_correction(p: GeodesicPath, near_a: bool) -> np.ndarray:
    # A#B - 2 A#_{1/4}B + A   or   A#B - 2 A#_{3/4}B + B
    if near_a:
        return p.at(0.5) - 2 * p.at(0.25) + p.A
    return p.at(0.5) - 2 * p.at(0.75) + p.B


def zhao_lower_n2(A, B, t: float, *, tol: float = DEFAULT_TOL, path=None) -> Certified:
    """Two-term refinement with the ``r0`` correction.

    ``t <= 1/2``: ``r0 (A#B - 2A#_{1/4}B + A) + 2t (A nabla B - A#B)``;
    ``t > 1/2``: ``r0 (A#B - 2A#_{3/4}B + B) + 2(1-t) (A nabla B - A#B)``.
    """
    t = _open_weight(t)
    p = _path(A, B, path)
    wc = weight_constants(t)
    first = t <= 0.5
    diff = (p.A + p.B) / 2 - p.at(0.5)
    term = wc.r0 * _zhao_correction(p, near_a=first) + 2 * wc.r * diff
    report = loewner_geq(
        (1 - t) * p.A + t * p.B, term + p.at(t), tol,
        inequality_id="zhao_lower", lhs_id="refinement+geometric",
        rhs_id="arithmetic", t=t,
    )
    return Certified(term, report)


def zhao_upper_n2(A, B, t: float, *, tol: float = DEFAULT_TOL, path=None) -> Certified:
    """Two-term reverse: ``A nabla_t B <= A#_tB + 2R(A nabla B - A#B) - r0 (...)``.

    The ``r0`` bracket uses ``A#_{3/4}B`` and ``B`` for ``t <= 1/2`` and
    ``A#_{1/4}B`` and ``A`` otherwise.
    """
    t = _open_weight(t)
    p = _path(A, B, path)
    wc = weight_constants(t)
    first = t <= 0.5
    diff = (p.A + p.B) / 2 - p.at(0.5)
    bound = p.at(t) + 2 * wc.R * diff - wc.r0 * _zhao_correction(p, near_a=not first)
    report = loewner_geq(
        bound, (1 - t) * p.A + t * p.B, tol, inequality_id="zhao_upper",
        lhs_id="arithmetic", rhs_id="bound", t=t,
    )
    return Certified(bound, report)
