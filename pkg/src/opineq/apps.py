"""Applications: Hoelder-type difference reverses, a concavity reverse,
Tsallis relative operator entropy and the epsilon-regularized mean.

The difference reverses are evaluated directly from the summed inputs.  The
same bound arises from :func:`opineq.posmaps.ando_reverse_bound_n2` applied
to ``diag(A_1, ..., A_n)``, ``diag(B_1, ..., B_n)`` and the block-diagonal
sum map; the tests compare the two assemblies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError
from .matspd import (
    DEFAULT_TOL,
    GeodesicPath,
    SlackReport,
    check_hermitian,
    frac_power,
    hermitize,
    loewner_geq,
    spectral_norm,
)
from .scalar_young import weight_constants

__all__ = [
    "Reverse",
    "ConvergenceReport",
    "holder_reverse",
    "concavity_reverse",
    "tsallis_entropy",
    "tsallis_superadditivity",
    "tsallis_reverse",
    "epsilon_regularized_mean",
    "default_eps_schedule",
]


class Reverse(NamedTuple):
    """``0 <= lhs <= rhs``; ``reports`` is ``(lhs <= rhs, 0 <= lhs)``."""

    lhs: np.ndarray
    rhs: np.ndarray
    reports: tuple


def _open(t) -> float:
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in the open interval (0, 1)")
    return t


def _pairs(As, Bs):
    As = [check_hermitian(A, "A_i") for A in As]
    Bs = [check_hermitian(B, "B_i") for B in Bs]
    if not As or len(As) != len(Bs):
        raise DomainError("As and Bs must be nonempty lists of equal length")
    shape = As[0].shape
    if any(M.shape != shape for M in As + Bs):
        raise DomainError("all matrices must share one dimension")
    return As, Bs


def _holder_parts(As, Bs, t):
    paths = [GeodesicPath(A, B) for A, B in zip(As, Bs)]
    outer = GeodesicPath(sum(As), sum(Bs))
    inner = {s: sum(p.at(s) for p in paths) for s in (0.25, 0.5, 0.75, t)}
    return outer, inner


def _holder_rhs(outer, inner, t):
    wc = weight_constants(t)
    SA, SB = outer.A, outer.B
    head = wc.R * (SA + SB - 2 * inner[0.5])
    if t <= 0.5:
        c1 = inner[0.5] + SB - 2 * inner[0.75]
        c2 = outer.at(0.5) + SA - 2 * outer.at(0.25)
    else:
        c1 = outer.at(0.5) + SB - 2 * outer.at(0.75)
        c2 = inner[0.5] + SA - 2 * inner[0.25]
    return head - wc.r0 * c1 - wc.r0 * c2


def _reverse_reports(lhs, rhs, iid, t, scale, tol):
    zero = np.zeros_like(lhs)
    return (
        loewner_geq(rhs, lhs, tol, inequality_id=iid, lhs_id="lhs", rhs_id="rhs",
                    t=t, scale=scale),
        loewner_geq(lhs, zero, tol, inequality_id=iid, lhs_id="0", rhs_id="lhs",
                    t=t, scale=scale),
    )


def holder_reverse(As: Sequence, Bs: Sequence, t: float, *, tol: float = DEFAULT_TOL) -> Reverse:
    """Reverse of ``sum(A_i #_t B_i) <= (sum A_i) #_t (sum B_i)``.

    ``lhs = (sum A_i) #_t (sum B_i) - sum(A_i #_t B_i)``.  The bound is
    ``R (sum A_i + sum B_i - 2 sum A_i#B_i)`` minus two ``r0`` corrections;
    for ``t <= 1/2`` the ``3/4`` correction is on the summed means and the
    ``1/4`` one on the mean of the sums, and for ``t > 1/2`` the placement
    is reversed.
    """
    t = _open(t)
    As, Bs = _pairs(As, Bs)
    outer, inner = _holder_parts(As, Bs, t)
    lhs = outer.at(t) - inner[t]
    rhs = _holder_rhs(outer, inner, t)
    scale = spectral_norm(outer.A) + spectral_norm(outer.B)
    return Reverse(lhs, rhs, _reverse_reports(lhs, rhs, "holder_rev", t, scale, tol))


def concavity_reverse(ws: Sequence[float], Ts: Sequence, t: float, *, tol: float = DEFAULT_TOL) -> Reverse:
    """Reverse of ``sum w_i T_i^t <= (sum w_i T_i)^t``.

    With ``S = sum w_i T_i`` and ``P(s) = sum w_i T_i^s`` the bound is::

        R (I + S - 2 P(1/2)) - r0 (P(1/2) + S - 2 P(3/4)) - r0 (S^{1/2} + I - 2 S^{1/4})

    for ``t <= 1/2``, and for ``t > 1/2``::

        R (I + S - 2 P(1/2)) - r0 (S^{1/2} + S - 2 S^{3/4}) - r0 (P(1/2) + I - 2 P(1/4))
    """
    t = _open(t)
    ws = np.asarray(ws, dtype=float)
    Ts = [check_hermitian(T, "T_i") for T in Ts]
    if ws.ndim != 1 or len(ws) != len(Ts) or len(Ts) == 0:
        raise DomainError("ws and Ts must be nonempty and of equal length")
    if np.any(ws <= 0) or abs(ws.sum() - 1) > 1e-12:
        raise DomainError("weights must be positive and sum to 1")
    if any(T.shape != Ts[0].shape for T in Ts):
        raise DomainError("all T_i must share one dimension")
    wc = weight_constants(t)
    eye = np.eye(Ts[0].shape[0])
    S = hermitize(sum(w * T for w, T in zip(ws, Ts)))

    def P(s):
        return sum(w * frac_power(T, s) for w, T in zip(ws, Ts))

    head = wc.R * (eye + S - 2 * P(0.5))
    if t <= 0.5:
        c1 = P(0.5) + S - 2 * P(0.75)
        c2 = frac_power(S, 0.5) + eye - 2 * frac_power(S, 0.25)
    else:
        c1 = frac_power(S, 0.5) + S - 2 * frac_power(S, 0.75)
        c2 = P(0.5) + eye - 2 * P(0.25)
    rhs = head - wc.r0 * c1 - wc.r0 * c2
    lhs = frac_power(S, t) - P(t)
    scale = 1.0 + spectral_norm(S)
    return Reverse(lhs, rhs, _reverse_reports(lhs, rhs, "concavity_rev", t, scale, tol))


def tsallis_entropy(A, B, t: float) -> np.ndarray:
    """``T_t(A|B) = (A #_t B - A) / t`` for ``0 < t <= 1``."""
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise DomainError("t must lie in (0, 1]")
    p = GeodesicPath(A, B)
    return (p.at(t) - p.A) / t


def _tsallis_scale(As, Bs, t):
    return (spectral_norm(sum(As)) + spectral_norm(sum(Bs))) / t


def tsallis_superadditivity(As: Sequence, Bs: Sequence, t: float, *, tol: float = DEFAULT_TOL) -> SlackReport:
    """Certify ``sum T_t(A_i|B_i) <= T_t(sum A_i | sum B_i)``."""
    As, Bs = _pairs(As, Bs)
    big = tsallis_entropy(sum(As), sum(Bs), t)
    parts = sum(tsallis_entropy(A, B, t) for A, B in zip(As, Bs))
    return loewner_geq(
        big, parts, tol, inequality_id="tsallis_super", lhs_id="sum T_t(A_i|B_i)",
        rhs_id="T_t(sum A|sum B)", t=float(t), scale=_tsallis_scale(As, Bs, t),
    )


def tsallis_reverse(As: Sequence, Bs: Sequence, t: float, *, tol: float = DEFAULT_TOL) -> Reverse:
    """Reverse of the Tsallis super-additivity.

    ``gap = T_t(sum A_i | sum B_i) - sum T_t(A_i|B_i)`` is bounded by the
    :func:`holder_reverse` bound divided by ``t``.
    """
    t = _open(t)
    As, Bs = _pairs(As, Bs)
    gap = tsallis_entropy(sum(As), sum(Bs), t) - sum(
        tsallis_entropy(A, B, t) for A, B in zip(As, Bs)
    )
    outer, inner = _holder_parts(As, Bs, t)
    rhs = _holder_rhs(outer, inner, t) / t
    scale = _tsallis_scale(As, Bs, t)
    return Reverse(gap, rhs, _reverse_reports(gap, rhs, "tsallis_rev", t, scale, tol))


@dataclass(frozen=True)
class ConvergenceReport:
    """Behaviour of ``A #_t (B + eps I)`` along a decreasing schedule.

    ``monotone`` holds when every step is Loewner non-increasing;
    ``converging`` when the successive spectral-norm differences do not
    grow.  Both are judged at ``tol`` relative to the iterate norms;
    ``size`` is the largest iterate norm.
    """

    eps: tuple
    diffs: tuple
    step_reports: tuple = field(repr=False)
    monotone: bool
    converging: bool
    size: float
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return self.monotone and self.converging

    @property
    def min_slack(self) -> float:
        return min((r.slack for r in self.step_reports), default=0.0)


def default_eps_schedule(A, B, k: int = 10) -> np.ndarray:
    """``10**-j * ||B||`` for ``j = 1..k``, or ``||A||`` in place of ``||B||`` when ``B = 0``."""
    base = spectral_norm(np.asarray(B))
    if base == 0:
        base = spectral_norm(np.asarray(A))
    return base * 10.0 ** -np.arange(1, k + 1)


def _mean_psd(a_half, a_ihalf, B, t):
    # A #_t B for positive definite A and positive semidefinite B
    C = hermitize(a_ihalf @ B @ a_ihalf)
    w, V = np.linalg.eigh(C)
    w = np.clip(w, 0.0, None)
    Ct = (V * w**t) @ V.conj().T if t != 0 else np.eye(C.shape[0])
    return hermitize(a_half @ Ct @ a_half)


def epsilon_regularized_mean(
    A,
    B,
    t: float,
    eps_schedule: Optional[Sequence[float]] = None,
    *,
    tol: float = DEFAULT_TOL,
) -> tuple:
    """Approximate ``A #_t B`` for singular ``B`` by ``A #_t (B + eps I)``.

    Returns the last iterate and a :class:`ConvergenceReport`.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    A = check_hermitian(A, "A")
    B = check_hermitian(B, "B")
    if A.shape != B.shape:
        raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
    wb = np.linalg.eigvalsh(B)
    if wb[0] < -1e-12 * max(abs(wb[-1]), 1.0):
        raise DomainError(f"B is not positive semidefinite (lambda_min={wb[0]:.3e})")
    eps = default_eps_schedule(A, B) if eps_schedule is None else np.asarray(eps_schedule, float)
    if eps.ndim != 1 or eps.size == 0 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise DomainError("eps_schedule must be a nonempty strictly decreasing positive sequence")
    a_half = frac_power(A, 0.5)
    a_ihalf = frac_power(A, -0.5)
    eye = np.eye(A.shape[0])
    iterates = [_mean_psd(a_half, a_ihalf, B + e * eye, t) for e in eps]
    steps = tuple(
        loewner_geq(prev, nxt, tol, inequality_id="eps_limit", lhs_id=f"M(eps_{k + 1})",
                    rhs_id=f"M(eps_{k})", t=t)
        for k, (prev, nxt) in enumerate(zip(iterates, iterates[1:]))
    )
    diffs = tuple(spectral_norm(p - q) for p, q in zip(iterates, iterates[1:]))
    size = max(spectral_norm(M) for M in iterates)
    converging = all(b <= a + tol * size for a, b in zip(diffs, diffs[1:]))
    report = ConvergenceReport(
        eps=tuple(float(e) for e in eps), diffs=diffs, step_reports=steps,
        monotone=all(r.passed for r in steps), converging=converging, size=size,
        tol=tol,
    )
    return iterates[-1], report
