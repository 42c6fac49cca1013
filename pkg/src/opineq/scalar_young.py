"""Scalar Young refinements and reverses.

Every function here accepts numpy arrays for ``t``, ``a`` and ``b`` and
broadcasts, so a whole random sample can be checked in one call.  The
operator modules use the same coefficient sequences; on commuting inputs
their results must agree with the scalar values computed here.

Weight convention
-----------------
Two conventions meet in this module and are easy to confuse:

* :func:`scalar_sababheh_bounds` puts the weight ``t`` on ``a``:
  ``t*a + (1-t)*b - a**t * b**(1-t)``.
* :func:`scalar_zhao_bounds` puts the weight ``t`` on ``b``:
  ``(1-t)*a + t*b - a**(1-t) * b**t``, matching ``A #_t B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "WeightConstants",
    "RefinementSchedule",
    "weight_constants",
    "refinement_schedule",
    "scalar_SN",
    "scalar_sababheh_bounds",
    "scalar_zhao_bounds",
    "N_MAX",
]

N_MAX = 16


@dataclass(frozen=True)
class WeightConstants:
    t: float
    r: float
    R: float
    r0: float


@dataclass(frozen=True)
class RefinementSchedule:
    """Per-index coefficients of the N-term refinement series.

    Index ``j`` of every tuple corresponds to the series index ``j + 1``.
    ``s``, ``r`` and ``k`` are evaluated at ``t``; ``s_double`` at ``2t``
    and ``s_reflect`` at ``2 - 2t`` (the weights of the reverse series).
    """

    t: float
    N: int
    r: tuple[int, ...]
    k: tuple[int, ...]
    s: tuple[float, ...]
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    gamma: tuple[float, ...]
    s_double: tuple[float, ...]
    s_reflect: tuple[float, ...]


def _check_weight(t, lo=0.0, hi=1.0, name="t"):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < lo) or np.any(t > hi):
        raise DomainError(f"{name} must lie in [{lo}, {hi}]")
    return t


def _check_positive(**values):
    out = []
    for name, v in values.items():
        v = np.asarray(v, dtype=float)
        if np.any(~np.isfinite(v)) or np.any(v <= 0):
            raise DomainError(f"{name} must be positive")
        out.append(v)
    return out


def weight_constants(t: float) -> WeightConstants:
    """Return ``r = min(t, 1-t)``, ``R = max(t, 1-t)`` and ``r0 = min(2r, 1-2r)``."""
    t = float(_check_weight(t))
    r = min(t, 1.0 - t)
    R = max(t, 1.0 - t)
    return WeightConstants(t=t, r=r, R=R, r0=min(2.0 * r, 1.0 - 2.0 * r))


def _rkm(t, j, mode):
    """Floor sequences of the weight ``tau`` derived from ``t``.

    Returns ``(m, r, k)`` with ``m = 2**(j-1) * tau``, ``r = floor(2**j tau)``
    and ``k = floor(2**(j-1) tau)``.  ``tau`` is ``t``, ``2t`` or ``2-2t``
    (``mode`` "id", "double", "reflect").  Scaling by a power of two is exact
    in binary floating point, so the floors are exact; the reflected weight
    is floored through ``floor(n - y) = n - ceil(y)`` to avoid rounding
    ``2 - 2t`` first.
    """
    if mode == "id":
        m = np.ldexp(t, j - 1)
        return m, np.floor(np.ldexp(t, j)), np.floor(m)
    if mode == "double":
        m = np.ldexp(t, j)
        return m, np.floor(np.ldexp(t, j + 1)), np.floor(m)
    if mode == "reflect":
        y = np.ldexp(t, j)
        m = 2.0**j - y
        return m, 2.0 ** (j + 1) - np.ceil(np.ldexp(t, j + 1)), 2.0**j - np.ceil(y)
    raise ValueError(mode)


def _s_coeff(m, r):
    # (-1)^r m + (-1)^(r+1) floor((r+1)/2)
    sign = 1.0 - 2.0 * np.mod(r, 2.0)
    return sign * (m - np.floor((r + 1.0) / 2.0))


def _series_terms(t, j, mode):
    m, r, k = _rkm(t, j, mode)
    return _s_coeff(m, r), k


def refinement_schedule(t: float, N: int = 4) -> RefinementSchedule:
    t = float(_check_weight(t))
    if int(N) != N or N < 1 or N > N_MAX:
        raise DomainError(f"N must be an integer in [1, {N_MAX}]")
    N = int(N)
    rs, ks, ss, al, be, ga, sd, sr = ([] for _ in range(8))
    for j in range(1, N + 1):
        m, r, k = _rkm(t, j, "id")
        rs.append(int(r))
        ks.append(int(k))
        ss.append(float(_s_coeff(m, r)))
        al.append(float(k) / 2.0 ** (j - 1))
        m2, r2, k2 = _rkm(t, j, "double")
        be.append(float(k2) * 2.0**-j)
        sd.append(float(_s_coeff(m2, r2)))
        m3, r3, k3 = _rkm(t, j, "reflect")
        ga.append(float(k3) * 2.0 ** (1 - j))
        sr.append(float(_s_coeff(m3, r3)))
    return RefinementSchedule(
        t=t, N=N, r=tuple(rs), k=tuple(ks), s=tuple(ss), alpha=tuple(al),
        beta=tuple(be), gamma=tuple(ga), s_double=tuple(sd), s_reflect=tuple(sr),
    )


def _pow(x, e):
    return np.exp(e * np.log(x))


def _sn(t, a, b, N, mode):
    total = np.zeros(np.broadcast(t, a, b).shape)
    la, lb = np.log(a), np.log(b)
    for j in range(1, N + 1):
        s, k = _series_terms(t, j, mode)
        h = 2.0 ** (j - 1)
        d = 2.0**j
        first = np.exp(((h - k) * lb + k * la) / d)
        second = np.exp(((k + 1) * la + (h - k - 1) * lb) / d)
        total = total + s * (first - second) ** 2
    return total


def scalar_SN(t, a, b, N: int = 4):
    """N-term refinement series ``S_N(t; a, b)``.

    Sum over ``j = 1..N`` of ``s_j(t)`` times the squared difference of the
    ``2**j``-th roots of ``b**(2**(j-1)-k_j) a**k_j`` and
    ``a**(k_j+1) b**(2**(j-1)-k_j-1)``.  Nonnegative up to roundoff and
    bounded above by ``t*a + (1-t)*b - a**t * b**(1-t)``.
    """
    t = _check_weight(t)
    a, b = _check_positive(a=a, b=b)
    if N < 1 or N > N_MAX:
        raise DomainError(f"N must be in [1, {N_MAX}]")
    return _sn(t, a, b, int(N), "id")[()]


def scalar_sababheh_bounds(t, a, b, N: int = 4):
    """Return ``(lower, middle, upper)`` with weight ``t`` on ``a``.

    ``middle = t*a + (1-t)*b - a**t * b**(1-t)``, ``lower = S_N(t; a, b)``.
    The upper bound is ``(1-t)(sqrt a - sqrt b)**2 - S_N(2t; sqrt(ab), a)``
    for ``t <= 1/2`` and ``t (sqrt a - sqrt b)**2 - S_N(2-2t; sqrt(ab), b)``
    otherwise.
    """
    t = _check_weight(t)
    a, b = _check_positive(a=a, b=b)
    if N < 1 or N > N_MAX:
        raise DomainError(f"N must be in [1, {N_MAX}]")
    N = int(N)
    middle = t * a + (1 - t) * b - _pow(a, t) * _pow(b, 1 - t)
    lower = _sn(t, a, b, N, "id")
    g = np.sqrt(a * b)
    sq = (np.sqrt(a) - np.sqrt(b)) ** 2
    first = t <= 0.5
    up_i = (1 - t) * sq - _sn(t, g, a, N, "double")
    up_ii = t * sq - _sn(t, g, b, N, "reflect")
    upper = np.where(first, up_i, up_ii)
    return lower[()], middle[()], upper[()]


def scalar_zhao_bounds(t, a, b):
    """Return ``(lower, middle, upper)`` with weight ``t`` on ``b``.

    ``middle = (1-t)*a + t*b - a**(1-t) * b**t``.  For ``t <= 1/2``::

        lower = r0 (q - sqrt a)**2 + r (sqrt a - sqrt b)**2
        upper = R (sqrt a - sqrt b)**2 - r0 (q - sqrt b)**2

    with ``q = (ab)**(1/4)``; for ``t > 1/2`` the mirror image under
    ``t -> 1-t``, ``a <-> b``.  ``t`` must lie strictly inside (0, 1).
    """
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0) or np.any(t >= 1):
        raise DomainError("t must lie in the open interval (0, 1)")
    a, b = _check_positive(a=a, b=b)
    r = np.minimum(t, 1 - t)
    R = np.maximum(t, 1 - t)
    r0 = np.minimum(2 * r, 1 - 2 * r)
    ra, rb = np.sqrt(a), np.sqrt(b)
    q = np.sqrt(np.sqrt(a * b))
    sq = (ra - rb) ** 2
    middle = (1 - t) * a + t * b - _pow(a, 1 - t) * _pow(b, t)
    first = t <= 0.5
    lower = r * sq + r0 * np.where(first, (q - ra) ** 2, (q - rb) ** 2)
    upper = R * sq - r0 * np.where(first, (q - rb) ** 2, (q - ra) ** 2)
    return lower[()], middle[()], upper[()]
