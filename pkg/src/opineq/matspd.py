"""Hermitian positive-definite matrices, weighted means and Loewner checks.

Matrices are plain numpy arrays.  Every composite result is re-symmetrized
with ``(M + M^*)/2`` before it is returned, so downstream eigenvalue
computations never see roundoff-level skew parts.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import DomainError, IllConditionedError

__all__ = [
    "DEFAULT_TOL",
    "COND_EPS",
    "MAX_DIM",
    "SlackReport",
    "Chain",
    "Certified",
    "GeodesicPath",
    "hermitize",
    "check_hermitian",
    "spectral_norm",
    "frac_power",
    "geometric_mean",
    "arithmetic_mean",
    "harmonic_mean",
    "loewner_geq",
    "scalar_geq",
    "random_hpd",
    "random_unitary",
    "random_unit_vector",
    "block_diag",
    "as_rng",
]

DEFAULT_TOL = 1e-9
COND_EPS = 1e-13
MAX_DIM = 64

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


@dataclass(frozen=True)
class SlackReport:
    """Outcome of certifying ``lhs <= rhs`` in the Loewner order.

    ``slack`` is the smallest eigenvalue of ``rhs - lhs`` (or the plain
    difference for scalar inequalities) and ``scale`` the sum of the two
    spectral norms.  The check passes when ``slack >= -tol * scale``.
    """

    inequality_id: str
    lhs_id: str
    rhs_id: str
    slack: float
    scale: float
    passed: bool
    tol: float = DEFAULT_TOL
    seed: Optional[int] = None
    t: Optional[float] = None
    dim: Optional[int] = None

    @property
    def relative_slack(self) -> float:
        return self.slack / self.scale if self.scale > 0 else self.slack

    def to_dict(self) -> dict:
        return asdict(self)


class Chain(NamedTuple):
    """``lower <= middle <= upper`` together with the two certifications."""

    lower: object
    middle: object
    upper: object
    reports: tuple


class Certified(NamedTuple):
    value: object
    report: SlackReport


def as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def hermitize(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def check_hermitian(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise DomainError(f"{name} exceeds the dimension cap {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise DomainError(f"{name} has non-finite entries")
    skew = np.max(np.abs(M - M.conj().T)) if M.size else 0.0
    if skew > 1e-12 * max(np.max(np.abs(M)), 1e-300):
        raise DomainError(f"{name} is not Hermitian (skew {skew:.3e})")
    return hermitize(M)


def spectral_norm(M: np.ndarray) -> float:
    if M.shape == (1, 1):
        return float(abs(M[0, 0]))
    return float(np.max(np.abs(np.linalg.eigvalsh(hermitize(M)))))


def _pd_eigh(M: np.ndarray, name: str):
    w, U = np.linalg.eigh(M)
    if not w[-1] > 0 or w[0] <= COND_EPS * w[-1]:
        raise IllConditionedError(
            f"{name} is singular or ill-conditioned "
            f"(lambda_min={w[0]:.3e}, lambda_max={w[-1]:.3e})"
        )
    return w, U


def frac_power(A, s: float) -> np.ndarray:
    """``A**s`` for Hermitian positive-definite ``A`` and any real ``s``."""
    A = check_hermitian(A, "A")
    w, U = _pd_eigh(A, "A")
    if s == 0:
        return np.eye(A.shape[0], dtype=A.dtype)
    if s == 1:
        return A
    return hermitize((U * np.exp(s * np.log(w))) @ U.conj().T)


class GeodesicPath:
    """Weighted geometric means ``A #_s B`` for many ``s`` at once.

    With ``C = A^{-1/2} B A^{-1/2} = V diag(mu) V^*`` and ``W = A^{1/2} V``
    the mean is ``W diag(mu**s) W^*``, so after one pair of
    eigendecompositions each exponent costs a single product.  ``s`` may be
    any real number; the same formula extends the mean outside [0, 1].
    """

    def __init__(self, A, B):
        A = check_hermitian(A, "A")
        B = check_hermitian(B, "B")
        if A.shape != B.shape:
            raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
        w, U = _pd_eigh(A, "A")
        root = np.sqrt(w)
        a_half = (U * root) @ U.conj().T
        a_ihalf = (U / root) @ U.conj().T
        C = hermitize(a_ihalf @ B @ a_ihalf)
        mu, V = _pd_eigh(C, "A^{-1/2} B A^{-1/2}")
        self.A = A
        self.B = B
        self._W = a_half @ V
        self._log_mu = np.log(mu)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def at(self, s: float) -> np.ndarray:
        if s == 0:
            return self.A
        if s == 1:
            return self.B
        W = self._W
        return hermitize((W * np.exp(s * self._log_mu)) @ W.conj().T)

    __call__ = at


def geometric_mean(A, B, s: float = 0.5) -> np.ndarray:
    return GeodesicPath(A, B).at(s)


def arithmetic_mean(A, B, t: float = 0.5) -> np.ndarray:
    A = check_hermitian(A, "A")
    B = check_hermitian(B, "B")
    if A.shape != B.shape:
        raise DomainError(f"dimension mismatch {A.shape} vs {B.shape}")
    return (1 - t) * A + t * B


def harmonic_mean(A, B, t: float = 0.5) -> np.ndarray:
    return frac_power(
        arithmetic_mean(frac_power(A, -1), frac_power(B, -1), t), -1
    )


def loewner_geq(
    X,
    Y,
    tol: float = DEFAULT_TOL,
    *,
    inequality_id: str = "",
    lhs_id: str = "lhs",
    rhs_id: str = "rhs",
    t: Optional[float] = None,
    seed: Optional[int] = None,
    scale: Optional[float] = None,
) -> SlackReport:
    """Certify ``Y <= X``; ``Y`` is the left-hand side of the claim.

    ``scale`` defaults to ``||X|| + ||Y||``.  Inequalities whose two sides are
    both differences (reverse bounds) pass the size of the ingredients
    instead, since both sides may vanish up to roundoff.
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape or X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DomainError(f"dimension mismatch {X.shape} vs {Y.shape}")
    slack = float(np.linalg.eigvalsh(hermitize(X - Y))[0])
    if scale is None:
        scale = spectral_norm(X) + spectral_norm(Y)
    return SlackReport(
        inequality_id=inequality_id, lhs_id=lhs_id, rhs_id=rhs_id,
        slack=slack, scale=float(scale), passed=bool(slack >= -tol * scale), tol=tol,
        seed=seed, t=t, dim=X.shape[0],
    )


def scalar_geq(
    x: float,
    y: float,
    tol: float = DEFAULT_TOL,
    *,
    inequality_id: str = "",
    lhs_id: str = "lhs",
    rhs_id: str = "rhs",
    t: Optional[float] = None,
    seed: Optional[int] = None,
    dim: Optional[int] = None,
    scale: Optional[float] = None,
) -> SlackReport:
    """Scalar counterpart of :func:`loewner_geq`: certify ``y <= x``."""
    x = float(x)
    y = float(y)
    slack = x - y
    if scale is None:
        scale = abs(x) + abs(y)
    return SlackReport(
        inequality_id=inequality_id, lhs_id=lhs_id, rhs_id=rhs_id,
        slack=slack, scale=float(scale), passed=bool(slack >= -tol * scale), tol=tol,
        seed=seed, t=t, dim=dim,
    )


def random_unitary(n: int, seed: SeedLike = None, *, real: bool = False) -> np.ndarray:
    """Haar-distributed unitary (orthogonal if ``real``) via phase-fixed QR."""
    rng = as_rng(seed)
    Z = rng.standard_normal((n, n))
    if not real:
        Z = (Z + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_hpd(
    n: int,
    cond_cap: float = 1e4,
    seed: SeedLike = None,
    *,
    real: bool = False,
) -> np.ndarray:
    """Random positive-definite matrix with condition number at most ``cond_cap``.

    Eigenvalues are log-uniform on ``[cond_cap**-0.5, cond_cap**0.5]`` and the
    eigenbasis is a Haar unitary, both drawn from ``seed``.
    """
    if n < 1 or n > MAX_DIM:
        raise DomainError(f"n must be in [1, {MAX_DIM}]")
    if not cond_cap >= 1:
        raise DomainError("cond_cap must be >= 1")
    rng = as_rng(seed)
    half = 0.5 * np.log(cond_cap)
    w = np.exp(rng.uniform(-half, half, size=n))
    U = random_unitary(n, rng, real=real)
    return hermitize((U * w) @ U.conj().T)


def random_unit_vector(n: int, seed: SeedLike = None, *, real: bool = False) -> np.ndarray:
    rng = as_rng(seed)
    x = rng.standard_normal(n)
    if not real:
        x = x + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def block_diag(*blocks) -> np.ndarray:
    blocks = [np.atleast_2d(np.asarray(b)) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    dtype = np.result_type(*blocks)
    out = np.zeros((n, n), dtype=dtype)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out
