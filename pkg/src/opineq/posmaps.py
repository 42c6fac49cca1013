"""Positive linear maps, Ando's inequality and its reverses.

A map is a small immutable object with ``in_dim``, ``out_dim``, a declared
``unital`` flag and ``__call__``.  The zoo covers unital and non-unital,
dimension-preserving and rank-reducing maps::

    >>> phi = BlockDiagSum(n_blocks=2, block=3)
    >>> phi.in_dim, phi.out_dim, phi.unital
    (6, 3, False)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IllConditionedError
from .matspd import (
    DEFAULT_TOL,
    Certified,
    GeodesicPath,
    SlackReport,
    as_rng,
    hermitize,
    loewner_geq,
    random_hpd,
    random_unitary,
    spectral_norm,
)
from .refinements import DEFAULT_N, lower_series, upper_series
from .scalar_young import refinement_schedule, weight_constants

__all__ = [
    "PositiveMap",
    "Identity",
    "Congruence",
    "Pinching",
    "BlockDiagSum",
    "TraceFunctional",
    "ConvexCombination",
    "MAP_KINDS",
    "UNITAL_KINDS",
    "apply_map",
    "random_map",
    "verify_map",
    "ando_check",
    "ando_reverse_bound",
    "ando_reverse_bound_n2",
    "AndoReverseN2",
]


class PositiveMap:
    kind = "abstract"
    in_dim: int
    out_dim: int

    @property
    def unital(self) -> bool:
        raise NotImplementedError

    def _apply(self, M: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, M) -> np.ndarray:
        M = np.asarray(M)
        if M.shape != (self.in_dim, self.in_dim):
            raise DomainError(
                f"{self.kind} map expects {self.in_dim}x{self.in_dim} input, got {M.shape}"
            )
        return hermitize(self._apply(M))


@dataclass(frozen=True)
class Identity(PositiveMap):
    n: int
    kind = "identity"

    @property
    def in_dim(self):
        return self.n

    @property
    def out_dim(self):
        return self.n

    @property
    def unital(self):
        return True

    def _apply(self, M):
        return M


@dataclass(frozen=True, eq=False)
class Congruence(PositiveMap):
    """``M -> X^* M X`` for an ``n x m`` matrix ``X`` (unital iff ``X^*X = I``)."""

    X: np.ndarray
    kind = "congruence"

    @property
    def in_dim(self):
        return self.X.shape[0]

    @property
    def out_dim(self):
        return self.X.shape[1]

    @property
    def unital(self):
        G = self.X.conj().T @ self.X
        return bool(np.max(np.abs(G - np.eye(self.out_dim))) <= 1e-12)

    def _apply(self, M):
        return self.X.conj().T @ M @ self.X


@dataclass(frozen=True)
class Pinching(PositiveMap):
    """Zero every off-diagonal block of the given partition."""

    sizes: tuple
    kind = "pinching"

    @property
    def in_dim(self):
        return int(sum(self.sizes))

    @property
    def out_dim(self):
        return self.in_dim

    @property
    def unital(self):
        return True

    def _apply(self, M):
        out = np.zeros_like(M)
        i = 0
        for k in self.sizes:
            out[i:i + k, i:i + k] = M[i:i + k, i:i + k]
            i += k
        return out


@dataclass(frozen=True)
class BlockDiagSum(PositiveMap):
    """``[C_ij] -> sum_i C_ii`` on ``n_blocks x n_blocks`` block matrices."""

    n_blocks: int
    block: int
    kind = "block_diag_sum"

    @property
    def in_dim(self):
        return self.n_blocks * self.block

    @property
    def out_dim(self):
        return self.block

    @property
    def unital(self):
        return self.n_blocks == 1

    def _apply(self, M):
        k = self.block
        return sum(M[i * k:(i + 1) * k, i * k:(i + 1) * k] for i in range(self.n_blocks))


@dataclass(frozen=True, eq=False)
class TraceFunctional(PositiveMap):
    """``M -> tr(M rho) I_out`` with ``rho`` a density matrix."""

    rho: np.ndarray
    out: int = 1
    kind = "trace_functional"

    def __post_init__(self):
        rho = np.asarray(self.rho)
        if abs(np.trace(rho) - 1) > 1e-12:
            raise DomainError("rho must have unit trace")
        if np.linalg.eigvalsh(hermitize(rho))[0] < -1e-12:
            raise DomainError("rho must be positive semidefinite")

    @property
    def in_dim(self):
        return self.rho.shape[0]

    @property
    def out_dim(self):
        return self.out

    @property
    def unital(self):
        return True

    def _apply(self, M):
        return np.real(np.trace(M @ self.rho)) * np.eye(self.out)


@dataclass(frozen=True, eq=False)
class ConvexCombination(PositiveMap):
    """``sum_i w_i Phi_i`` with positive weights (unital iff every map is and the weights sum to 1)."""

    weights: tuple
    maps: tuple
    kind = "convex_combination"

    def __post_init__(self):
        if not self.maps or len(self.weights) != len(self.maps):
            raise DomainError("need one positive weight per map")
        if any(w <= 0 for w in self.weights):
            raise DomainError("weights must be positive")
        dims = {(m.in_dim, m.out_dim) for m in self.maps}
        if len(dims) != 1:
            raise DomainError("maps in a combination must share dimensions")

    @property
    def in_dim(self):
        return self.maps[0].in_dim

    @property
    def out_dim(self):
        return self.maps[0].out_dim

    @property
    def unital(self):
        return abs(sum(self.weights) - 1) <= 1e-12 and all(m.unital for m in self.maps)

    def _apply(self, M):
        return sum(w * m(M) for w, m in zip(self.weights, self.maps))


MAP_KINDS = (
    "identity", "congruence", "pinching", "block_diag_sum",
    "trace_functional", "convex_combination",
)
UNITAL_KINDS = ("identity", "congruence", "pinching", "trace_functional", "convex_combination")


def apply_map(phi: PositiveMap, M) -> np.ndarray:
    return phi(M)


def _partition(n: int, rng) -> tuple:
    if n == 1:
        return (1,)
    cuts = np.sort(rng.choice(np.arange(1, n), size=rng.integers(1, n), replace=False))
    edges = np.concatenate(([0], cuts, [n]))
    return tuple(int(b - a) for a, b in zip(edges[:-1], edges[1:]))


def _smallest_factor(n: int) -> int:
    for p in range(2, n + 1):
        if n % p == 0:
            return p
    return 1


def random_map(kind: str, n: int, seed=None, *, unital: bool = False) -> PositiveMap:
    """Draw a map of the given kind with input dimension ``n``.

    With ``unital=True`` the congruence is an isometry and a convex
    combination uses unital parts with weights summing to one; otherwise
    congruences are random invertible (or full-column-rank) matrices and
    combination weights are arbitrary positive numbers.
    """
    rng = as_rng(seed)
    if kind == "identity":
        return Identity(n)
    if kind == "congruence":
        m = int(rng.integers(max(1, n - 1), n + 1))
        if unital:
            return Congruence(random_unitary(n, rng)[:, :m])
        X = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        return Congruence(X / np.sqrt(2 * n))
    if kind == "pinching":
        return Pinching(_partition(n, rng))
    if kind == "block_diag_sum":
        if unital:
            raise DomainError("block_diag_sum is not unital for more than one block")
        p = _smallest_factor(n)
        return BlockDiagSum(n_blocks=p, block=n // p)
    if kind == "trace_functional":
        rho = random_hpd(n, 1e2, rng)
        rho = rho / np.real(np.trace(rho))
        return TraceFunctional(rho, out=int(rng.integers(1, n + 1)) if n > 1 else 1)
    if kind == "convex_combination":
        k = int(rng.integers(2, 4))
        parts = [Identity(n)]
        for _ in range(k - 1):
            if rng.uniform() < 0.5:
                parts.append(Pinching(_partition(n, rng)))
            elif unital:
                parts.append(Congruence(random_unitary(n, rng)))
            else:
                X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                parts.append(Congruence(X / np.sqrt(2 * n)))
        w = rng.uniform(0.1, 1.0, size=k)
        if unital:
            w = w / w.sum()
        return ConvexCombination(tuple(float(x) for x in w), tuple(parts))
    raise DomainError(f"unknown map kind {kind!r}")


def verify_map(phi: PositiveMap, seed=None, trials: int = 8) -> dict:
    """Empirically check positivity, linearity and the declared unital flag.

    Returns the worst observed violations; raises :class:`DomainError` if
    any exceeds its tolerance.
    """
    rng = as_rng(seed)
    n = phi.in_dim
    worst_pos = worst_lin = 0.0
    for _ in range(trials):
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        P = G @ G.conj().T
        Q = random_hpd(n, 1e3, rng)
        out = phi(P)
        nrm = max(spectral_norm(out), 1e-300)
        worst_pos = min(worst_pos, np.linalg.eigvalsh(out)[0] / nrm)
        a = float(rng.uniform(-2, 2))
        lin = phi(a * P + Q) - (a * phi(P) + phi(Q))
        scale = abs(a) * spectral_norm(phi(P)) + spectral_norm(phi(Q))
        worst_lin = max(worst_lin, np.max(np.abs(lin)) / scale)
    unit_err = float(np.max(np.abs(phi(np.eye(n)) - np.eye(phi.out_dim))))
    if worst_pos < -1e-10:
        raise DomainError(f"{phi.kind} is not positive (ratio {worst_pos:.3e})")
    if worst_lin > 1e-12:
        raise DomainError(f"{phi.kind} is not linear (error {worst_lin:.3e})")
    if phi.unital and unit_err > 1e-12:
        raise DomainError(f"{phi.kind} declared unital but |Phi(I) - I| = {unit_err:.3e}")
    return {"positivity": worst_pos, "linearity": worst_lin, "unital_error": unit_err}


def _mapped_paths(phi, A, B, path):
    p = path if path is not None else GeodesicPath(A, B)
    try:
        q = GeodesicPath(phi(p.A), phi(p.B))
    except IllConditionedError as exc:
        raise IllConditionedError(f"Phi(A) or Phi(B) is not invertible: {exc}") from None
    return p, q


def _ingredient_scale(q: GeodesicPath) -> float:
    return spectral_norm(q.A) + spectral_norm(q.B)


def ando_check(phi: PositiveMap, A, B, t: float, *, tol: float = DEFAULT_TOL, path=None) -> SlackReport:
    """Certify ``Phi(A #_t B) <= Phi(A) #_t Phi(B)``."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    p, q = _mapped_paths(phi, A, B, path)
    return loewner_geq(
        q.at(t), phi(p.at(t)), tol, inequality_id="ando",
        lhs_id="Phi(A#B)", rhs_id="Phi(A)#Phi(B)", t=t,
    )


def _head(p, q, phi, R):
    # 2R (Phi(A)#Phi(B) - Phi(A#B) + (Phi(A) + Phi(B) - 2 Phi(A)#Phi(B)) / 2)
    gq = q.at(0.5)
    return 2 * R * (gq - phi(p.at(0.5)) + 0.5 * (q.A + q.B - 2 * gq))


def ando_reverse_bound(
    phi: PositiveMap,
    A,
    B,
    t: float,
    N: int = DEFAULT_N,
    *,
    tol: float = DEFAULT_TOL,
    path=None,
) -> Certified:
    """N-term reverse of Ando's inequality; ``Phi`` need not be unital.

    Returns the right-hand side ``rhs`` and certifies
    ``Phi(A)#_tPhi(B) - Phi(A#_tB) <= rhs``, where ``rhs`` is the ``2R``
    head term minus the reverse-series correction evaluated on
    ``Phi(A #_s B)`` and minus the refinement series evaluated on
    ``Phi(A) #_s Phi(B)``.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    p, q = _mapped_paths(phi, A, B, path)
    sched = refinement_schedule(t, N)
    R = weight_constants(t).R
    branch = "i" if t <= 0.5 else "ii"
    rhs = (
        _head(p, q, phi, R)
        - upper_series(lambda s: phi(p.at(s)), sched, branch)
        - lower_series(q.at, sched)
    )
    lhs = q.at(t) - phi(p.at(t))
    report = loewner_geq(
        rhs, lhs, tol, inequality_id="ando_rev", lhs_id="ando_gap",
        rhs_id="reverse_bound", t=t, scale=_ingredient_scale(q),
    )
    return Certified(rhs, report)


@dataclass(frozen=True)
class AndoReverseN2:
    lhs: np.ndarray
    rhs_tight: np.ndarray
    rhs_loose: np.ndarray
    reports: tuple = field(default_factory=tuple)


def ando_reverse_bound_n2(
    phi: PositiveMap, A, B, t: float, *, tol: float = DEFAULT_TOL, path=None
) -> AndoReverseN2:
    """Two-term reverse of Ando's inequality with both ``r0`` corrections.

    Certifies ``lhs <= rhs_tight <= rhs_loose``; the loose bound is the bare
    ``2R`` head term.
    """
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in the open interval (0, 1)")
    p, q = _mapped_paths(phi, A, B, path)
    wc = weight_constants(t)
    loose = _head(p, q, phi, wc.R)
    phi_g = phi(p.at(0.5))
    if t <= 0.5:
        mapped = phi_g + q.B - 2 * phi(p.at(0.75))
        outer = q.at(0.5) + q.A - 2 * q.at(0.25)
    else:
        outer = q.at(0.5) + q.B - 2 * q.at(0.75)
        mapped = phi_g + q.A - 2 * phi(p.at(0.25))
    tight = loose - wc.r0 * mapped - wc.r0 * outer
    lhs = q.at(t) - phi(p.at(t))
    scale = _ingredient_scale(q)
    reports = (
        loewner_geq(tight, lhs, tol, inequality_id="ando_rev_n2", lhs_id="ando_gap",
                    rhs_id="rhs_tight", t=t, scale=scale),
        loewner_geq(loose, tight, tol, inequality_id="ando_rev_n2", lhs_id="rhs_tight",
                    rhs_id="rhs_loose", t=t, scale=scale),
    )
    return AndoReverseN2(lhs, tight, loose, reports)
