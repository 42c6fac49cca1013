"""Seeded batch verification: registry of checks, run configuration, replay.

Each registered inequality id maps to a function that draws one random
instance from a generator and returns ``(check_name, SlackReport)`` pairs.
The generator for a trial is seeded from ``(seed, crc32(id), dim, trial)``,
so a record carries everything needed to rebuild its instance and the
results do not depend on evaluation order or worker count.
"""
from __future__ import annotations

import csv
import json
import math
import statistics
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import apps, hm, posmaps, refinements
from .errors import DomainError, IllConditionedError
from .matspd import (
    DEFAULT_TOL,
    MAX_DIM,
    SlackReport,
    random_hpd,
    random_unit_vector,
    random_unitary,
    scalar_geq,
)
from .scalar_young import N_MAX

__all__ = [
    "REGISTRY",
    "IDS",
    "RunConfig",
    "IdSummary",
    "RunSummary",
    "t_grid",
    "trial_rng",
    "evaluate",
    "run",
    "replay",
    "RECORD_FIELDS",
]

RECORD_FIELDS = (
    "inequality_id", "check", "trial", "seed", "dim", "t", "N", "map_kind",
    "cond_cap", "tol", "slack", "scale", "passed", "asserted",
)

SINGULAR_RATIO = 1e-10
MAX_RESAMPLE = 50


@dataclass(frozen=True)
class Instance:
    rng: np.random.Generator
    dim: int
    t: float
    N: int
    cond_cap: float
    tol: float
    map_kind: Optional[str]

    def hpd(self, n: Optional[int] = None) -> np.ndarray:
        return random_hpd(self.dim if n is None else n, self.cond_cap, self.rng)


CheckFn = Callable[[Instance], list]


@dataclass(frozen=True)
class Entry:
    fn: CheckFn
    description: str
    uses_map: bool = False
    unital_only: bool = False
    t_domain: str = "open"  # "open", "closed", "half_open" (0, 1], "low" (0, 1/2]


REGISTRY: dict = {}


def _register(name, description, **kw):
    def deco(fn):
        REGISTRY[name] = Entry(fn, description, **kw)
        return fn
    return deco


def _pairs(reports, names):
    return list(zip(names, reports))


def _well_conditioned(M) -> bool:
    w = np.linalg.eigvalsh(M)
    return w[-1] > 0 and w[0] >= SINGULAR_RATIO * w[-1]


def _draw_map(inst: Instance, kind: str, unital: Optional[bool] = None):
    if unital is None:
        unital = kind != "block_diag_sum" and bool(inst.rng.uniform() < 0.5)
    return posmaps.random_map(kind, inst.dim, inst.rng, unital=unital)


def _mapped_instance(inst: Instance):
    # resample until Phi(A) and Phi(B) are safely invertible
    for _ in range(MAX_RESAMPLE):
        phi = _draw_map(inst, inst.map_kind)
        A, B = inst.hpd(), inst.hpd()
        if _well_conditioned(phi(A)) and _well_conditioned(phi(B)):
            return phi, A, B
    raise IllConditionedError("could not draw an instance with invertible Phi(A), Phi(B)")


def _unital_pair(inst: Instance):
    phi = _draw_map(inst, inst.map_kind, unital=True)
    for _ in range(MAX_RESAMPLE):
        psi = _draw_map(inst, inst.map_kind, unital=True)
        if psi.out_dim == phi.out_dim:
            return phi, psi
    raise DomainError("could not draw two maps with a common output dimension")


def _lists(inst: Instance):
    n = int(inst.rng.integers(1, 5))
    return [inst.hpd() for _ in range(n)], [inst.hpd() for _ in range(n)]


@_register("kitt", "Kittaneh-type two-sided bound on the Young gap", t_domain="closed")
def _kitt(inst):
    c = refinements.kittaneh_chain(inst.hpd(), inst.hpd(), inst.t, tol=inst.tol)
    return _pairs(c.reports, ("lower", "upper"))


@_register("zhao_lower", "two-term refinement with the r0 correction")
def _zl(inst):
    return [("bound", refinements.zhao_lower_n2(inst.hpd(), inst.hpd(), inst.t, tol=inst.tol).report)]


@_register("zhao_upper", "two-term reverse with the r0 correction")
def _zu(inst):
    return [("bound", refinements.zhao_upper_n2(inst.hpd(), inst.hpd(), inst.t, tol=inst.tol).report)]


@_register("sab_lower", "N-term refinement of the operator Young inequality", t_domain="closed")
def _sl(inst):
    r = refinements.sababheh_lower(inst.hpd(), inst.hpd(), inst.t, inst.N, tol=inst.tol)
    return [("bound", r.report)]


@_register("sab_upper", "N-term reverse of the operator Young inequality", t_domain="closed")
def _su(inst):
    r = refinements.sababheh_upper(inst.hpd(), inst.hpd(), inst.t, inst.N, tol=inst.tol)
    return [("bound", r.report)]


@_register("ando", "Ando inequality for a positive map", uses_map=True, t_domain="closed")
def _ando(inst):
    phi, A, B = _mapped_instance(inst)
    return [("bound", posmaps.ando_check(phi, A, B, inst.t, tol=inst.tol))]


@_register("ando_rev", "N-term reverse of Ando's inequality", uses_map=True, t_domain="closed")
def _ando_rev(inst):
    phi, A, B = _mapped_instance(inst)
    r = posmaps.ando_reverse_bound(phi, A, B, inst.t, inst.N, tol=inst.tol)
    return [("bound", r.report)]


@_register("ando_rev_n2", "two-term reverse of Ando's inequality", uses_map=True)
def _ando_rev_n2(inst):
    phi, A, B = _mapped_instance(inst)
    r = posmaps.ando_reverse_bound_n2(phi, A, B, inst.t, tol=inst.tol)
    return _pairs(r.reports, ("tight", "loose"))


@_register("hm_classic", "Hoelder-McCarthy inequality", t_domain="closed")
def _hm_classic(inst):
    T = inst.hpd()
    x = random_unit_vector(inst.dim, inst.rng)
    return [("bound", hm.hm_classic(T, x, inst.t, tol=inst.tol))]


@_register("hm_two_map", "two-map quadratic-form Young chain", uses_map=True, unital_only=True)
def _hm_two(inst):
    phi, psi = _unital_pair(inst)
    x = random_unit_vector(phi.out_dim, inst.rng)
    c = hm.hm_two_map_chain(phi, psi, inst.hpd(), inst.hpd(), x, inst.t, tol=inst.tol)
    return _pairs(c.reports, ("lower", "upper"))


@_register("hm_mixed", "two-map chain with the power outside", uses_map=True, unital_only=True)
def _hm_mixed(inst):
    phi, psi = _unital_pair(inst)
    x = random_unit_vector(phi.out_dim, inst.rng)
    c = hm.hm_mixed_chain(phi, psi, inst.hpd(), inst.hpd(), x, inst.t, tol=inst.tol)
    return _pairs(c.reports, ("lower", "upper"))


@_register("hm_self", "two-sided reverse of Hoelder-McCarthy for a unital map",
           uses_map=True, unital_only=True)
def _hm_self(inst):
    phi = _draw_map(inst, inst.map_kind, unital=True)
    x = random_unit_vector(phi.out_dim, inst.rng)
    c = hm.hm_self_reverse(phi, inst.hpd(), x, inst.t, tol=inst.tol)
    return _pairs(c.reports, ("lower", "upper"))


@_register("hm_simple", "reverse of Hoelder-McCarthy for t <= 1/2", t_domain="low")
def _hm_simple(inst):
    T = inst.hpd()
    x = random_unit_vector(inst.dim, inst.rng)
    s = hm.hm_reverse_simple(T, x, inst.t, tol=inst.tol)
    # the loose bound is only claimed when <Tx, x> >= 1
    return [("tight", s.reports[0]), ("loose", s.reports[1], s.form >= 1)]


@_register("holder_rev", "difference reverse of the Hoelder inequality")
def _holder(inst):
    As, Bs = _lists(inst)
    r = apps.holder_reverse(As, Bs, inst.t, tol=inst.tol)
    return _pairs(r.reports, ("upper", "lower"))


@_register("concavity_rev", "reverse of the operator concavity of x^t")
def _concavity(inst):
    n = int(inst.rng.integers(1, 5))
    w = inst.rng.dirichlet(np.ones(n))
    Ts = [inst.hpd() for _ in range(n)]
    r = apps.concavity_reverse(w / w.sum(), Ts, inst.t, tol=inst.tol)
    return _pairs(r.reports, ("upper", "lower"))


@_register("tsallis_super", "super-additivity of the Tsallis relative operator entropy",
           t_domain="half_open")
def _tsallis_super(inst):
    As, Bs = _lists(inst)
    return [("bound", apps.tsallis_superadditivity(As, Bs, inst.t, tol=inst.tol))]


@_register("tsallis_rev", "reverse of Tsallis super-additivity")
def _tsallis_rev(inst):
    As, Bs = _lists(inst)
    r = apps.tsallis_reverse(As, Bs, inst.t, tol=inst.tol)
    return _pairs(r.reports, ("upper", "lower"))


def rank_deficient_psd(n: int, cond_cap: float, rng) -> np.ndarray:
    """Positive semidefinite matrix with exactly one zero eigenvalue."""
    half = 0.5 * math.log(cond_cap)
    w = np.exp(rng.uniform(-half, half, size=n))
    w[0] = 0.0
    U = random_unitary(n, rng)
    M = (U * w) @ U.conj().T
    return (M + M.conj().T) / 2


@_register("eps_limit", "epsilon-regularized mean for singular B", t_domain="closed")
def _eps(inst):
    A = inst.hpd()
    B = rank_deficient_psd(inst.dim, inst.cond_cap, inst.rng)
    _, rep = apps.epsilon_regularized_mean(A, B, inst.t, tol=inst.tol)
    worst = min(rep.step_reports, key=lambda r: r.slack / r.scale if r.scale else r.slack,
                default=None)
    out = []
    if worst is not None:
        out.append(("monotone", worst))
    # shrinking differences are not guaranteed at small t, so this is recorded
    # but not asserted
    growth = [b - a for a, b in zip(rep.diffs, rep.diffs[1:])]
    out.append(("converging", scalar_geq(
        0.0, max(growth, default=0.0), inst.tol, inequality_id="eps_limit",
        lhs_id="diff_{k+1} - diff_k", rhs_id="0", t=inst.t, dim=inst.dim, scale=rep.size,
    ), False))
    return out


IDS = tuple(REGISTRY)


def t_grid(k: int = 19) -> tuple:
    """``i/(k+1)`` for ``i = 1..k`` together with the kinks 1/4, 1/2, 3/4."""
    if k < 1:
        raise DomainError("grid size must be >= 1")
    pts = {i / (k + 1) for i in range(1, k + 1)} | {0.25, 0.5, 0.75}
    return tuple(sorted(pts))


def fold_t(t: float, domain: str) -> float:
    if domain == "low" and t > 0.5:
        return 1.0 - t
    return t


def _crc(name: str) -> int:
    return zlib.crc32(name.encode("ascii"))


def trial_rng(seed: int, inequality_id: str, dim: int, trial: int, stream: int = 0):
    return np.random.default_rng(
        np.random.SeedSequence([seed, _crc(inequality_id), dim, trial, stream])
    )


@dataclass
class RunConfig:
    """Batch parameters; ``t_mode`` is ``"grid"`` (with ``t_grid_size``) or ``"uniform"``."""

    inequality_ids: tuple = IDS
    dims: tuple = (2, 3, 4, 8)
    trials: int = 100
    seed: int = 0
    t_mode: str = "grid"
    t_grid_size: int = 19
    N: int = refinements.DEFAULT_N
    cond_cap: float = 1e4
    tol: float = DEFAULT_TOL
    map_kinds: tuple = posmaps.MAP_KINDS
    output_path: Optional[str] = None
    format: str = "jsonl"
    workers: int = 1

    def validate(self) -> "RunConfig":
        unknown = [i for i in self.inequality_ids if i not in REGISTRY]
        if unknown:
            raise DomainError(f"unknown inequality ids: {', '.join(unknown)}")
        if not self.inequality_ids:
            raise DomainError("no inequality ids selected")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        if not self.dims or any(int(d) != d or d < 1 or d > MAX_DIM for d in self.dims):
            raise DomainError(f"dims must be integers in [1, {MAX_DIM}]")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if not self.cond_cap >= 1:
            raise DomainError("cond_cap must be >= 1")
        if int(self.N) != self.N or not 1 <= self.N <= N_MAX:
            raise DomainError(f"N must be an integer in [1, {N_MAX}]")
        if self.t_mode not in ("grid", "uniform"):
            raise DomainError("t_mode must be 'grid' or 'uniform'")
        if self.t_mode == "grid" and self.t_grid_size < 1:
            raise DomainError("grid size must be >= 1")
        bad = [k for k in self.map_kinds if k not in posmaps.MAP_KINDS]
        if bad or not self.map_kinds:
            raise DomainError(f"unknown or empty map kinds: {bad}")
        if self.format not in ("jsonl", "csv"):
            raise DomainError("format must be 'jsonl' or 'csv'")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        return self


def _pick_t(cfg: RunConfig, iid: str, dim: int, trial: int, grid) -> float:
    entry = REGISTRY[iid]
    if cfg.t_mode == "grid":
        t = grid[trial % len(grid)]
    else:
        t = float(trial_rng(cfg.seed, iid, dim, trial, stream=1).uniform(0.0, 1.0))
        if entry.t_domain != "closed":
            t = min(max(t, 1e-6), 1 - 1e-6)
    return fold_t(t, entry.t_domain)


def _pick_kind(cfg: RunConfig, iid: str, trial: int) -> Optional[str]:
    entry = REGISTRY[iid]
    if not entry.uses_map:
        return None
    kinds = list(cfg.map_kinds)
    if entry.unital_only:
        kinds = [k for k in kinds if k in posmaps.UNITAL_KINDS] or ["identity"]
    return kinds[trial % len(kinds)]


def _instance(iid, seed, dim, trial, t, N, cond_cap, tol, map_kind) -> Instance:
    if iid not in REGISTRY:
        raise DomainError(f"unknown inequality id {iid!r}")
    return Instance(trial_rng(int(seed), iid, int(dim), int(trial)), int(dim), float(t),
                    int(N), float(cond_cap), float(tol), map_kind)


def evaluate(
    inequality_id: str,
    seed: int,
    dim: int,
    trial: int,
    t: float,
    N: int = refinements.DEFAULT_N,
    cond_cap: float = 1e4,
    tol: float = DEFAULT_TOL,
    map_kind: Optional[str] = None,
) -> list:
    """Rebuild one trial and return its records (dicts in ``RECORD_FIELDS`` order)."""
    inst = _instance(inequality_id, seed, dim, trial, t, N, cond_cap, tol, map_kind)
    out = []
    for item in REGISTRY[inequality_id].fn(inst):
        check, rep = item[0], item[1]
        asserted = bool(item[2]) if len(item) > 2 else True
        out.append({
            "inequality_id": inequality_id, "check": check, "trial": int(trial),
            "seed": int(seed), "dim": int(dim), "t": float(t), "N": int(N),
            "map_kind": map_kind, "cond_cap": float(cond_cap), "tol": float(tol),
            "slack": float(rep.slack), "scale": float(rep.scale),
            "passed": bool(rep.passed), "asserted": asserted,
        })
    return out


@dataclass
class IdSummary:
    trials: int = 0
    records: int = 0
    failures: int = 0
    min_slack: float = math.inf
    min_relative_slack: float = math.inf
    min_slack_seed: Optional[dict] = None
    median_slack: float = math.nan
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RunSummary:
    per_id: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(s.failures for s in self.per_id.values())

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {k: v.to_dict() for k, v in self.per_id.items()}

    def format_table(self) -> str:
        head = f"{'id':<14}{'trials':>8}{'fail':>6}{'min rel slack':>16}{'time [s]':>10}"
        lines = [head]
        for k, s in self.per_id.items():
            lines.append(f"{k:<14}{s.trials:>8}{s.failures:>6}"
                         f"{s.min_relative_slack:>16.3e}{s.wall_time:>10.2f}")
        return "\n".join(lines)


def _task(args):
    cfg, iid, dim = args
    grid = t_grid(cfg.t_grid_size)
    start = time.perf_counter()
    records = []
    for trial in range(cfg.trials):
        records.extend(evaluate(
            iid, cfg.seed, dim, trial, _pick_t(cfg, iid, dim, trial, grid),
            cfg.N, cfg.cond_cap, cfg.tol, _pick_kind(cfg, iid, trial),
        ))
    return iid, records, time.perf_counter() - start


def _summarize(s: IdSummary, records: list, trials: int, wall: float):
    s.trials += trials
    s.records += len(records)
    s.wall_time += wall
    for r in records:
        if not r["asserted"]:
            continue
        if not r["passed"]:
            s.failures += 1
        rel = r["slack"] / r["scale"] if r["scale"] > 0 else r["slack"]
        if rel < s.min_relative_slack:
            s.min_relative_slack = rel
            s.min_slack_seed = {k: r[k] for k in ("seed", "dim", "trial", "check")}
        s.min_slack = min(s.min_slack, r["slack"])


def _write(path: str, fmt: str, records: Iterable[dict]):
    with open(path, "w", newline="") as fh:
        if fmt == "jsonl":
            for r in records:
                fh.write(json.dumps(r, sort_keys=False) + "\n")
        else:
            w = csv.DictWriter(fh, fieldnames=RECORD_FIELDS)
            w.writeheader()
            for r in records:
                w.writerow(r)


def run(config: RunConfig) -> tuple:
    """Execute a batch and return ``(RunSummary, records)``.

    Records are ordered by inequality id, then dimension, then trial, and
    are written to ``config.output_path`` when it is set.
    """
    cfg = config.validate()
    if cfg.output_path is not None:
        try:
            open(cfg.output_path, "w").close()
        except OSError as exc:
            raise DomainError(f"cannot write {cfg.output_path}: {exc}") from None
    tasks = [(cfg, iid, int(d)) for iid in cfg.inequality_ids for d in cfg.dims]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_task, tasks))
    else:
        results = [_task(a) for a in tasks]
    summary = RunSummary()
    slacks: dict = {}
    records = []
    for iid, recs, wall in results:
        _summarize(summary.per_id.setdefault(iid, IdSummary()), recs, cfg.trials, wall)
        slacks.setdefault(iid, []).extend(r["slack"] for r in recs if r["asserted"])
        records.extend(recs)
    for iid, vals in slacks.items():
        summary.per_id[iid].median_slack = statistics.median(vals) if vals else math.nan
    if cfg.output_path is not None:
        _write(cfg.output_path, cfg.format, records)
    return summary, records


def replay(record: dict) -> SlackReport:
    """Recompute the certification behind one emitted record."""
    try:
        iid = record["inequality_id"]
        check = record["check"]
        kw = dict(
            seed=int(record["seed"]), dim=int(record["dim"]), trial=int(record["trial"]),
            t=float(record["t"]), N=int(record["N"]), cond_cap=float(record["cond_cap"]),
            tol=float(record["tol"]),
            map_kind=record.get("map_kind") or None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed record: {exc}") from None
    inst = _instance(iid, **kw)
    for item in REGISTRY[iid].fn(inst):
        if item[0] == check:
            return item[1]
    raise DomainError(f"record check {check!r} not produced by {iid}")
