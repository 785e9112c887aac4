"""Acceptance gate: one PASS/FAIL line per primary criterion."""

import io
import json
import time

import pytest

from nervess.checks import run_random_checks
from nervess.cli import main
from nervess.cotor import builtin_rep, lbg_cohomology, lemma51_check
from nervess.exactla import as_field
from nervess.hh import bar_tor_sphere, induced_action, koszul_tate_tor, kt_acyclicity
from nervess.simpl import builtin_group, sphere_model, transformation_groupoid
from nervess.totss import DoubleComplex, SpectralSequence, compare_with_diagonal

from test_cotor import FIELDS, GROUPS, REPS, expected_cohomology
from test_hh import freeloop_oracle


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {tag}  {detail}")
        assert ok, f"{tag}: {detail}"
    return emit


def test_freeloop_closed_form(report):
    worst, bad = 0.0, []
    for n, p in [(2, 3), (3, 3), (3, 5), (4, 5), (5, 0), (4, 0)]:
        out = io.StringIO()
        t0 = time.perf_counter()
        code = main(["freeloop-rp", "--n", str(n), "--p", str(p), "--max-degree", "12",
                     "--format", "json"], out=out)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        res = json.loads(out.getvalue())["result"]
        if code != 0 or res["series"] != res["closed_form"] or \
                res["series"] != freeloop_oracle(n, 12) or dt >= 60:
            bad.append((n, p, res["series"], round(dt, 2)))
    report("freeloop-rp closed form, degree <= 12", not bad,
           f"slowest {worst:.2f}s" + (f" mismatches {bad}" if bad else ""))


def _rp_ss(n, p):
    top = n + 3
    G = builtin_group("Z2")
    b = transformation_groupoid(G, sphere_model(n, top), top)
    F = as_field(p)
    t0 = time.perf_counter()
    ss = SpectralSequence(DoubleComplex(b, F), top)
    totals = ss.infinity_totals()
    diag = compare_with_diagonal(b, F, ss.top, ring=False)
    return ss, totals, diag, time.perf_counter() - t0


def test_borel_collapse_odd(report):
    lines, ok = [], True
    for n in (1, 2, 3):
        ss, totals, diag, dt = _rp_ss(n, 3)
        c = diag["certified_through"]
        # H^*(RP^n; GF(3)): 1 in degree 0, plus degree n for n odd
        want = [1 if d == 0 or (d == n and n % 2) else 0 for d in range(c + 1)]
        good = totals[:c + 1] == diag["diag"][:c + 1] == want and dt < 300 and c >= n
        ok &= good
        lines.append(f"n={n}: {totals[:c + 1]} ({dt:.1f}s)")
    report("Borel collapse over GF(3), E_inf = H(diag)", ok, "; ".join(lines))


def _has_higher_differential(ss):
    for r in range(2, ss.top + 1):
        for n in range(ss.top):
            for p in range(n + 1):
                if ss.dc.available(p, n - p):
                    d = ss.differential(r, p, n - p)
                    if any(x for row in d.rows for x in row):
                        return True
    return False


def test_char2_cross_check(report):
    lines, ok = [], True
    for n in (1, 2):
        ss, totals, diag, dt = _rp_ss(n, 2)
        good = totals[:n + 1] == diag["diag"][:n + 1] == [1] * (n + 1) and \
            diag["certified_through"] >= n and _has_higher_differential(ss)
        ok &= good
        lines.append(f"n={n}: {totals[:n + 1]}")
    report("GF(2) RP^n through degree n, with a nonzero d_r, r >= 2", ok, "; ".join(lines))


def test_cotor_equals_group_cohomology_matrix(report):
    bad = []
    for G in GROUPS:
        for name in REPS:
            for p in FIELDS:
                rep = builtin_rep(builtin_group(G), name, as_field(p))
                try:
                    out = lemma51_check(rep, 5)
                except AssertionError as exc:
                    bad.append((G, name, p, str(exc)))
                    continue
                cot = [sum(r["cotor"] for r in out["rows"] if r["k"] == k) for k in range(6)]
                if not out["pass"] or cot != expected_cohomology(G, name, p):
                    bad.append((G, name, p, cot))
    report("Cotor = group cohomology, 4 x 4 x 4 matrix, k <= 5", not bad,
           f"{64 - len(bad)}/64 cases" + (f" mismatches {bad}" if bad else ""))


def test_lbg(report):
    bad = []
    for G, p in [("Z2", 2), ("Z2", 3), ("Z2", 0), ("Z3", 3), ("Z3", 2), ("Z3", 0)]:
        grp = builtin_group(G)
        res = lbg_cohomology(grp, as_field(p), 5)
        want = [grp.order * d for d in expected_cohomology(G, "trivial", p)]
        if res.series()[:6] != want:
            bad.append((G, p, res.series()[:6], want))
    s3 = lbg_cohomology(builtin_group("S3"), as_field(0), 5).series()[:6]
    if s3 != [3, 0, 0, 0, 0, 0]:
        bad.append(("S3", 0, s3))
    report("LBG = |G| x H^*(G) for Z2, Z3; S3 over Q is (3,0,...)", not bad,
           f"S3/Q {s3}" + (f" mismatches {bad}" if bad else ""))


def test_resolution_independence(report):
    bad = []
    for n in (2, 4):
        for twist in (1, -1):
            for p in (3, 5, 0):
                small = koszul_tate_tor(n, twist, p, 10)
                bar = bar_tor_sphere(n, twist, p, 10)
                act = induced_action(small, "tau", bar_check=True)
                gens_ok = all(g.get("agree", True) for g in act["generators"])
                if small.dims != bar.dims or not act["agree"] or not gens_ok:
                    bad.append((n, twist, p))
    report("small resolution = bar complex, tau signs agree", not bad,
           "12 cases" + (f" mismatches {bad}" if bad else ""))


def test_structural_suites(report):
    total, fails = 0, 0
    for seed, count, p in [(21, 40, 2), (22, 40, 3), (23, 20, 0)]:
        out = run_random_checks(seed, count, p)
        total += len(out["instances"])
        fails += out["failures"]
    kt = all(kt_acyclicity(n, p, 12)["pass"] for n in (2, 3, 4, 5) for p in (3, 0))
    report("d^2, Leibniz, page derivations, H(Tot) = H(diag), KT acyclicity",
           fails == 0 and total >= 100 and kt,
           f"{total} random instances, {fails} failures, KT acyclic {kt}")

