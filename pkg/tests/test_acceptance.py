"""Acceptance suite: nine end-to-end criteria at their stated sizes.

Each test prints one ``criterion k: PASS|FAIL`` line (collected and echoed
in the terminal summary as well) and asserts the criterion.  Run alone with
``pytest -m acceptance``.
"""
from __future__ import annotations

import json
import time

import numpy as np
import pytest

from opineq import apps, hm, posmaps, refinements
from opineq.cli import REPLAY_RTOL, main
from opineq.harness import rank_deficient_psd, replay, t_grid, trial_rng
from opineq.matspd import (
    GeodesicPath,
    block_diag,
    random_hpd,
    random_unit_vector,
    random_unitary,
)
from opineq.posmaps import MAP_KINDS, UNITAL_KINDS, BlockDiagSum, random_map
from opineq.scalar_young import scalar_sababheh_bounds, scalar_zhao_bounds, weight_constants

pytestmark = pytest.mark.acceptance

RESULTS: list = []
DIMS = (2, 3, 4, 8)
COND = 1e4
TOL = 1e-9
GRID = t_grid(19)


def _report(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)


def _rng(k: int, i: int, stream: int = 0):
    return trial_rng(2024, f"acceptance-{k}", DIMS[i % len(DIMS)], i, stream)


def _t(rng, i, lo=0.0, hi=1.0):
    # alternate between the grid (with its kinks) and uniform draws
    if i % 2:
        t = GRID[(i // 2) % len(GRID)]
        if lo < t < hi:
            return t
    return float(rng.uniform(lo, hi))


class _Worst:
    """Track the failing count and the smallest relative slack."""

    def __init__(self):
        self.n = 0
        self.fail = 0
        self.rel = np.inf

    def add(self, rep):
        self.n += 1
        self.fail += not rep.passed
        self.rel = min(self.rel, rep.relative_slack)

    def text(self):
        return f"{self.n} checks, {self.fail} failures, min rel slack {self.rel:.2e}"


# ---------------------------------------------------------------------------

def test_criterion_1_scalar_suite():
    rng = np.random.default_rng(1)
    n = 10**5
    start = time.perf_counter()
    t = rng.uniform(0, 1, n)
    t[: n // 10] = rng.choice(GRID, n // 10)
    a, b = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), (2, n)))
    Ns = rng.integers(1, 9, n)
    scale = np.maximum(a, b)
    worst = np.inf
    for N in range(1, 9):
        m = Ns == N
        lo, mid, up = scalar_sababheh_bounds(t[m], a[m], b[m], N)
        worst = min(worst, np.min((mid - lo) / scale[m]), np.min((up - mid) / scale[m]))
    inner = (t > 0) & (t < 1)
    lo, mid, up = scalar_zhao_bounds(t[inner], a[inner], b[inner])
    s = scale[inner]
    worst = min(worst, np.min((mid - lo) / s), np.min((up - mid) / s))
    elapsed = time.perf_counter() - start
    ok = worst >= -1e-12 and elapsed < 10
    _report(1, ok, f"{n} points, min slack/max(a,b) {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_operator_refinements():
    start = time.perf_counter()
    w = _Worst()
    for i in range(10**4):
        rng = _rng(2, i)
        d = DIMS[i % len(DIMS)]
        A, B = random_hpd(d, COND, rng), random_hpd(d, COND, rng)
        t = _t(rng, i, 0.0, 1.0)
        N = 1 + i % 6
        p = GeodesicPath(A, B)
        for rep in refinements.kittaneh_chain(A, B, t, path=p).reports:
            w.add(rep)
        w.add(refinements.sababheh_lower(A, B, t, N, path=p).report)
        w.add(refinements.sababheh_upper(A, B, t, N, path=p).report)
        if 0 < t < 1:
            w.add(refinements.zhao_lower_n2(A, B, t, path=p).report)
            w.add(refinements.zhao_upper_n2(A, B, t, path=p).report)
    elapsed = time.perf_counter() - start
    ok = w.fail == 0 and elapsed < 60
    _report(2, ok, f"10000 instances, {w.text()}, {elapsed:.1f} s")
    assert ok


def test_criterion_3_commutative_reduction():
    worst = 0.0
    for i in range(10**3):
        rng = _rng(3, i)
        d = DIMS[i % len(DIMS)]
        a, b = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), (2, d)))
        A, B = np.diag(a), np.diag(b)
        t = _t(rng, i, 1e-3, 1 - 1e-3)
        N = 1 + i % 6
        p = GeodesicPath(A, B)
        wc = weight_constants(t)
        geo = a ** (1 - t) * b**t
        sq = (np.sqrt(a) - np.sqrt(b)) ** 2
        s_lo, _, s_up = scalar_sababheh_bounds(t, b, a, N)
        z_lo, _, z_up = scalar_zhao_bounds(t, a, b)
        kitt = refinements.kittaneh_chain(A, B, t, path=p)
        pairs = [
            (kitt.lower, geo + wc.r * sq),
            (kitt.upper, geo + wc.R * sq),
            (refinements.sababheh_lower(A, B, t, N, path=p).value, s_lo),
            (refinements.sababheh_upper(A, B, t, N, path=p).value, geo + s_up),
            (refinements.zhao_lower_n2(A, B, t, path=p).value, z_lo),
            (refinements.zhao_upper_n2(A, B, t, path=p).value, geo + z_up),
        ]
        for op, sc in pairs:
            worst = max(worst, float(np.max(np.abs(op - np.diag(sc)))))
    ok = worst <= 1e-11
    _report(3, ok, f"1000 diagonal instances, max entrywise error {worst:.2e}")
    assert ok


def test_criterion_4_ando_suite():
    w = _Worst()
    tight_loose = _Worst()
    kinds = {}
    for i in range(10**4):
        rng = _rng(4, i)
        d = DIMS[i % len(DIMS)]
        kind = MAP_KINDS[i % len(MAP_KINDS)]
        phi = random_map(kind, d, rng, unital=False)
        kinds[kind] = kinds.get(kind, 0) + 1
        A, B = random_hpd(d, COND, rng), random_hpd(d, COND, rng)
        t = _t(rng, i, 1e-6, 1 - 1e-6)
        N = (1, 2, 4)[i % 3]
        p = GeodesicPath(A, B)
        w.add(posmaps.ando_check(phi, A, B, t, path=p))
        w.add(posmaps.ando_reverse_bound(phi, A, B, t, N, path=p).report)
        res = posmaps.ando_reverse_bound_n2(phi, A, B, t, path=p)
        w.add(res.reports[0])
        tight_loose.add(res.reports[1])
    ok = w.fail == 0 and tight_loose.fail == 0 and set(kinds) == set(MAP_KINDS)
    _report(4, ok, f"10000 instances over {len(kinds)} map kinds, {w.text()}; "
                   f"tight<=loose {tight_loose.fail} failures")
    assert ok


def _unital_pair(rng, d, i):
    kinds = list(UNITAL_KINDS)
    while True:
        phi = random_map(kinds[i % len(kinds)], d, rng, unital=True)
        psi = random_map(kinds[(i // len(kinds)) % len(kinds)], d, rng, unital=True)
        if phi.out_dim == psi.out_dim:
            return phi, psi


def test_criterion_5_hm_suite():
    classic = _Worst()
    for i in range(10**5):
        rng = _rng(5, i)
        d = DIMS[i % len(DIMS)]
        T = random_hpd(d, COND, rng) * np.exp(rng.uniform(-3, 3))
        x = random_unit_vector(d, rng)
        classic.add(hm.hm_classic(T, x, _t(rng, i)))
    chains = _Worst()
    loose = _Worst()
    skipped = 0
    for i in range(10**4):
        rng = _rng(5, i, stream=2)
        d = DIMS[i % len(DIMS)]
        phi, psi = _unital_pair(rng, d, i)
        A = random_hpd(d, COND, rng) * np.exp(rng.uniform(-3, 3))
        B = random_hpd(d, COND, rng) * np.exp(rng.uniform(-3, 3))
        x = random_unit_vector(phi.out_dim, rng)
        t = _t(rng, i, 1e-6, 1 - 1e-6)
        for rep in hm.hm_two_map_chain(phi, psi, A, B, x, t).reports:
            chains.add(rep)
        for rep in hm.hm_mixed_chain(phi, psi, A, B, x, t).reports:
            chains.add(rep)
        for rep in hm.hm_self_reverse(phi, A, x, t).reports:
            chains.add(rep)
        ts = min(t, 0.5)
        xs = random_unit_vector(d, rng)
        simple = hm.hm_reverse_simple(A, xs, ts)
        chains.add(simple.reports[0])
        if simple.form >= 1:
            loose.add(simple.reports[1])
        else:
            skipped += 1
    ok = classic.fail == 0 and classic.rel >= -1e-11 and chains.fail == 0 and loose.fail == 0
    _report(5, ok, f"classic: {classic.text()}; chains: {chains.text()}; "
                   f"loose: {loose.n} asserted, {loose.fail} failures, {skipped} with form < 1")
    assert ok


def test_criterion_6_sums_and_entropy():
    holder = _Worst()
    conc = _Worst()
    tsal = _Worst()
    worst_match = 0.0
    worst_tsallis = 0.0
    for i in range(10**4):
        rng = _rng(6, i)
        d = DIMS[i % len(DIMS)]
        n = 1 + i % 4
        As = [random_hpd(d, COND, rng) for _ in range(n)]
        Bs = [random_hpd(d, COND, rng) for _ in range(n)]
        t = _t(rng, i, 1e-6, 1 - 1e-6)
        h = apps.holder_reverse(As, Bs, t)
        for rep in h.reports:
            holder.add(rep)
        red = posmaps.ando_reverse_bound_n2(BlockDiagSum(n, d), block_diag(*As), block_diag(*Bs), t)
        worst_match = max(worst_match,
                          float(np.max(np.abs(h.rhs - red.rhs_tight))) / h.reports[0].scale)
        tr = apps.tsallis_reverse(As, Bs, t)
        for rep in tr.reports:
            tsal.add(rep)
        worst_tsallis = max(worst_tsallis, float(np.max(np.abs(tr.rhs - h.rhs / t))))
        w = rng.dirichlet(np.ones(n))
        c = apps.concavity_reverse(w / w.sum(), Bs, t)
        for rep in c.reports:
            conc.add(rep)
    ok = (holder.fail == 0 and conc.fail == 0 and tsal.fail == 0
          and worst_match <= 1e-10 and worst_tsallis <= 1e-10)
    _report(6, ok, f"holder: {holder.text()}; block reduction rel err {worst_match:.2e}; "
                   f"tsallis rhs err {worst_tsallis:.2e}; concavity: {conc.text()}")
    assert ok


def test_criterion_7_structural_identities():
    worst = {"congruence": 0.0, "symmetry": 0.0, "idempotent": 0.0, "composition": 0.0}
    for i in range(10**3):
        rng = _rng(7, i)
        d = DIMS[i % len(DIMS)]
        A, B = random_hpd(d, COND, rng), random_hpd(d, COND, rng)
        t = _t(rng, i)
        p = GeodesicPath(A, B)
        G = p.at(t)
        sc = np.linalg.norm(A, 2) + np.linalg.norm(B, 2)
        # congruence by a well-conditioned invertible matrix
        U = random_unitary(d, rng)
        X = U * np.exp(rng.uniform(-1, 1, d))
        lhs = GeodesicPath(X @ A @ X.conj().T, X @ B @ X.conj().T).at(t)
        rhs = X @ G @ X.conj().T
        worst["congruence"] = max(worst["congruence"],
                                  np.max(np.abs(lhs - rhs)) / (np.linalg.norm(rhs, 2) + sc))
        worst["symmetry"] = max(worst["symmetry"],
                                np.max(np.abs(p.at(0.5) - GeodesicPath(B, A).at(0.5))) / sc)
        worst["idempotent"] = max(worst["idempotent"],
                                  np.max(np.abs(GeodesicPath(A, A).at(t) - A)) / sc)
        # A^{1/2} (A^{-1/2} B A^{-1/2})^s A^{1/2} composed: A#_u(A#_v B) = A#_{uv} B
        u, v = float(rng.uniform()), float(rng.uniform())
        inner = p.at(v)
        comp = GeodesicPath(A, inner).at(u)
        worst["composition"] = max(worst["composition"],
                                   np.max(np.abs(comp - p.at(u * v))) / sc)
    ok = all(v <= 1e-9 for v in worst.values())
    _report(7, ok, "1000 instances, " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_criterion_8_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    code_a = main(["run", "--seed", "3", "--out", str(a)])
    code_b = main(["run", "--seed", "3", "--out", str(b)])
    identical = a.read_bytes() == b.read_bytes()
    worst = 0.0
    count = 0
    with open(a) as fh:
        for line in fh:
            rec = json.loads(line)
            rep = replay(rec)
            ref = rec["slack"]
            denom = max(abs(ref), abs(rep.slack))
            if denom:
                worst = max(worst, abs(rep.slack - ref) / denom)
            count += 1
    capsys.readouterr()
    ok = code_a == 0 and code_b == 0 and identical and worst <= REPLAY_RTOL
    _report(8, ok, f"full run twice: exit {code_a}/{code_b}, byte-identical {identical}; "
                   f"{count} records replayed, max rel deviation {worst:.1e}")
    assert ok


def test_criterion_9_eps_regularization():
    monotone_fail = 0
    converge_fail = 0
    worst = np.inf
    growing_t = []
    for i in range(100):
        rng = _rng(9, i)
        d = DIMS[i % len(DIMS)]
        A = random_hpd(d, COND, rng)
        B = rank_deficient_psd(d, COND, rng)
        t = _t(rng, i)
        _, rep = apps.epsilon_regularized_mean(A, B, t)
        monotone_fail += not rep.monotone
        for r in rep.step_reports:
            worst = min(worst, r.relative_slack)
        if not rep.converging:
            converge_fail += 1
            growing_t.append(round(t, 3))
    ok = monotone_fail == 0 and converge_fail == 0
    _report(9, ok, f"100 instances, Loewner-monotone failures {monotone_fail} "
                   f"(min rel slack {worst:.1e}); growing differences {converge_fail} "
                   f"at t={sorted(growing_t)}")
    assert ok
