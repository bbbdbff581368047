"""Acceptance criteria, one PASS/FAIL line each (see the terminal summary).

Tolerances are pinned here:
  GW reduction vs dense      1e-4 absolute
  GW(G_5) vs closed form     1e-6 absolute
  SDP bound m=3              0.5 +- 1e-4, dense vs reduced within 1e-4
  SDP bound m=5              2 +- 1e-3
  SDP bound m=7 (stretch)    4.5 +- 1e-2
Runtime budgets: exact rows n<=11 15 min, m=3 1 min, m=5 30 min,
n=13 stretch 2 h (non-blocking), m=7 stretch (non-blocking).
"""
from __future__ import annotations

import math
import os
import random
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from bookcross.bipartite import (
    build_q_matrix,
    build_type_table,
    flip,
    pair_count,
    sdp_bound_solve,
    shift,
    verify_zar_certificate,
)
from bookcross.bounds import claim_a_ratio, genbound, k7_to_k8_bipartite, large_n_check
from bookcross.certificates import check_file, dump, gw_to_dict, zar_to_dict
from bookcross.circle_graph import build_chord_graph, chord_valency, zeta_bipartite, zeta_complete
from bookcross.gw import build_reduced, gw_full, gw_reduced_solve, verify_gw_certificate
from bookcross.maxcut import nu2_complete_exact, odd_to_even_step
from bookcross.pagecount import (
    TwoPageDrawing,
    blue,
    crossings_between,
    extract_types,
    red,
    star,
    zarankiewicz_drawing,
)
from conftest import record
from oracles import naive_crossings, star_pair_crossings

TABLE1 = {5: (4, 1), 7: (26, 9), 9: (90, 36), 11: (230, 100)}
GW_REDUCTION_TOL = 1e-4
GW5_TOL = 1e-6
M3_TOL, M5_TOL, M7_TOL = 1e-4, 1e-3, 1e-2
RUN_STRETCH = os.environ.get("BOOKCROSS_STRETCH", "1") != "0"


@pytest.fixture(scope="module")
def table1_results():
    t0 = time.monotonic()
    res = {n: nu2_complete_exact(n) for n in TABLE1}
    return res, time.monotonic() - t0


@pytest.fixture(scope="module")
def gw_certs():
    return {n: gw_reduced_solve(build_reduced(n)) for n in (5, 7, 9, 11)}


def test_criterion_1_table1(table1_results):
    res, secs = table1_results
    got = {n: (r.maxcut.optimum, r.value) for n, r in res.items()}
    exact = all(r.proof_status == "exact" for r in res.values())
    zeta_ok = all(r.value == zeta_complete(n) for n, r in res.items())
    ok = got == TABLE1 and exact and zeta_ok and secs <= 15 * 60
    record("1 exact nu2(K_n) n=5,7,9,11", ok, f"(maxcut, nu2) = {got}, all exact={exact}, {secs:.0f}s <= 900s")
    assert ok


@pytest.mark.slow
def test_criterion_1_stretch_n13():
    if not RUN_STRETCH:
        record("1 stretch n=13", None, "skipped (BOOKCROSS_STRETCH=0)")
        pytest.skip("stretch runs disabled")
    t0 = time.monotonic()
    r = nu2_complete_exact(13, max_seconds=7200)
    secs = time.monotonic() - t0
    ok = (r.maxcut.optimum, r.value, r.proof_status) == (490, 225, "exact") and secs <= 7200
    record("1 stretch n=13", ok or None,
           f"maxcut={r.maxcut.optimum}, nu2={r.value}, {r.proof_status}, {secs:.0f}s <= 7200s")
    if not ok:
        pytest.xfail("non-blocking stretch target not reached")


def test_criterion_2_odd_to_even(table1_results):
    res, _ = table1_results
    got = {n + 1: odd_to_even_step(res[n].value, n) for n in (5, 7, 9, 11)}
    want = {n: zeta_complete(n) for n in (6, 8, 10, 12)}
    ok = got == want
    record("2 odd->even", ok, f"{got} vs Z = {want}")
    assert ok


def test_criterion_3_reduction_exact():
    t0 = time.monotonic()
    diffs = {}
    for n in (5, 7, 9):
        diffs[n] = abs(gw_reduced_solve(build_reduced(n)).bound - gw_full(build_chord_graph(n)))
    gw5 = gw_reduced_solve(build_reduced(5)).bound
    closed = 5 * (5 + math.sqrt(5)) / 8
    secs = time.monotonic() - t0
    ok = max(diffs.values()) <= GW_REDUCTION_TOL and abs(gw5 - closed) <= GW5_TOL and secs < 60
    record("3 GW reduction", ok,
           f"max |reduced - full| = {max(diffs.values()):.2e} <= {GW_REDUCTION_TOL}, "
           f"|GW(G5) - 5(5+sqrt5)/8| = {abs(gw5 - closed):.2e} <= {GW5_TOL}, {secs:.1f}s")
    assert ok


def test_criterion_4_sandwich(table1_results, gw_certs):
    res, _ = table1_results
    rows = {}
    for n, cert in gw_certs.items():
        v = verify_gw_certificate(cert)
        mc = res[n].maxcut.optimum
        rows[n] = (mc, float(v.gw_upper), v.valid and Fraction(878, 1000) * v.gw_upper <= mc <= v.gw_upper)
    ok = all(r[2] for r in rows.values())
    record("4 sandwich", ok, ", ".join(f"n={n}: {0.878 * g:.2f} <= {m} <= {g:.4f}" for n, (m, g, _) in rows.items()))
    assert ok


def test_criterion_5_claim_a():
    r = claim_a_ratio(899, 9381181976)
    arith = large_n_check(899, "1.76537474e10", 9381181976)
    ok = Fraction(9253, 10000) <= r <= Fraction(9254, 10000) and arith
    record("5 asymptotic ratio n=899", ok, f"ratio = {float(r):.6f} in [0.9253, 0.9254], "
                           f"C(899,4) - 1.76537474e10 >= 9381181976: {arith}")
    assert ok


def _bipartite_checks(m, q):
    tt = q.table
    sym = np.array_equal(q.entries, q.entries.T)
    inv = all(np.array_equal(q.entries[np.ix_(p, p)], q.entries)
              for p in ([tt.index[g(t, m)] for t in tt.types] for g in (flip, shift)))
    return sym, inv


def test_criterion_6_m3():
    t0 = time.monotonic()
    tt = build_type_table(3)
    q = build_q_matrix(tt)
    sym, inv = _bipartite_checks(3, q)
    ts = {}
    for path in ("dense", "reduced"):
        c = sdp_bound_solve(q, path=path)
        v = verify_zar_certificate(c, q)
        ts[path] = float(v.certified_t) if v.valid else math.nan
    poly = genbound(3, Fraction(1, 2))
    below = all(poly(n) <= zeta_bipartite(3, n) for n in range(1, 51))
    secs = time.monotonic() - t0
    ok = (len(tt) == 24 and len(tt.orbits) == 4 and sym and inv and below and secs <= 60
          and all(abs(t - 0.5) <= M3_TOL for t in ts.values())
          and abs(ts["dense"] - ts["reduced"]) <= M3_TOL)
    record("6 bipartite m=3", ok,
           f"{len(tt)} types/{len(tt.orbits)} orbits, symmetric={sym}, invariant={inv}, "
           f"t dense={ts['dense']:.7f} reduced={ts['reduced']:.7f} (0.5 +- {M3_TOL}), "
           f"{poly} <= Z(3,n) for n<=50: {below}, {secs:.1f}s <= 60s")
    assert ok


def test_criterion_7_m5():
    t0 = time.monotonic()
    q = build_q_matrix(build_type_table(5))
    c = sdp_bound_solve(q, path="reduced")
    v = verify_zar_certificate(c, q)
    poly = genbound(5, v.certified_t)
    below = all(poly(n) <= zeta_bipartite(5, n) for n in range(1, 51))
    secs = time.monotonic() - t0
    ok = v.valid and abs(float(v.certified_t) - 2) <= M5_TOL and below and secs <= 1800
    record("7 bipartite m=5", ok, f"certified t = {float(v.certified_t):.7f} (2 +- {M5_TOL}), "
                                  f"bound <= Z(5,n) for n<=50: {below}, {secs:.0f}s <= 1800s")
    assert ok


@pytest.mark.slow
def test_criterion_7_stretch_m7(tmp_path):
    if not RUN_STRETCH:
        record("7 stretch m=7", None, "skipped (BOOKCROSS_STRETCH=0)")
        pytest.skip("stretch runs disabled")
    t0 = time.monotonic()
    q = build_q_matrix(build_type_table(7))
    c = sdp_bound_solve(q, path="reduced", accuracy=1e-6)
    v = verify_zar_certificate(c, q)
    secs = time.monotonic() - t0
    t = float(v.certified_t) if v.valid else math.nan
    ok = v.valid and abs(t - 4.5) <= M7_TOL
    k7 = genbound(7, Fraction(9, 2))
    k8 = k7_to_k8_bipartite(k7)
    ok = ok and str(k7) == "9/4 n^2 - 21/2 n" and str(k8) == "3 n^2 - 14 n"
    record("7 stretch m=7", ok or None,
           f"certified t = {t:.5f} (4.5 +- {M7_TOL}), K7n: {k7}, K8n: {k8}, {secs:.0f}s")
    if not ok:
        pytest.xfail("non-blocking stretch target not reached")


def test_criterion_8a_edge_counts():
    bad = [n for n in range(4, 31) if build_chord_graph(n).num_edges != math.comb(n, 4)]
    record("8a |E_n| = C(n,4), 4<=n<=30", not bad, f"mismatches: {bad}")
    assert not bad


def test_criterion_8b_valency():
    bad = []
    for n in range(4, 31):
        g = build_chord_graph(n)
        deg = g.degrees()
        bad += [(n, c) for k, c in enumerate(g.chords) if deg[k] != chord_valency(c.dist, n)]
        if n % 2:
            d = n // 2
            bad += [(n, i) for i in range(2, d + 1)
                    if chord_valency(i, n) != i * (i - 1) + 2 * (i - 1) * (d - i)]
    record("8b valency, n<=30", not bad, f"mismatches: {len(bad)} (closed form checked for odd n)")
    assert not bad


def test_criterion_8c_startype_fuzz():
    rng = random.Random(8)
    qs = {m: build_q_matrix(build_type_table(m)) for m in range(2, 7)}
    violations = pairs = 0
    for _ in range(1000):
        m, n = rng.randint(2, 6), rng.randint(2, 8)
        blues, reds = [blue(i) for i in range(m)], [red(j) for j in range(n)]
        spine = blues + reds
        rng.shuffle(spine)
        d = TwoPageDrawing.make(spine, [(b, r, rng.choice(("upper", "lower"))) for b in blues for r in reds])
        types, q = extract_types(d, blues), qs[m]
        for i, r1 in enumerate(reds):
            for r2 in reds[i + 1:]:
                got = crossings_between(d, star(d, r1), star(d, r2))
                violations += got < q.entries[q.table.index[types[r1]], q.table.index[types[r2]]]
                pairs += 1
    record("8c startype fuzz", violations == 0, f"1000 drawings, {pairs} red pairs, {violations} violations")
    assert violations == 0


def test_criterion_8d_pair_count_oracle():
    bad = checked = 0
    for m in range(2, 6):
        types = build_type_table(m).types
        for s, t in product(types, types):
            if s.p <= t.p:
                bad += pair_count(s, t, m) != star_pair_crossings(s, t, m)
                checked += 1
    record("8d pair_count vs geometry, m<=5", bad == 0, f"{checked} ordered pairs, {bad} mismatches")
    assert bad == 0


def test_criterion_8e_zarankiewicz_drawings():
    bad = [(m, n) for m in range(1, 9) for n in range(1, 9)
           if naive_crossings(*(lambda d: (d.spine, d.edges))(zarankiewicz_drawing(m, n))) != zeta_bipartite(m, n)]
    record("8e Zarankiewicz drawings, m,n<=8", not bad, f"mismatches: {bad}")
    assert not bad


def test_criterion_8f_certificate_round_trip(tmp_path, gw_certs):
    q3 = build_q_matrix(build_type_table(3))
    payloads = {"gw": gw_to_dict(gw_certs[9]), "zar": zar_to_dict(sdp_bound_solve(q3))}
    ok, notes = True, []
    for kind, payload in payloads.items():
        path = tmp_path / f"{kind}.json"
        dump(payload, path)
        good = check_file(path).valid
        raw = bytearray(path.read_bytes())
        raw[len(raw) // 2] ^= 0x04
        path.write_bytes(bytes(raw))
        rejected = not check_file(path).valid
        ok = ok and good and rejected
        notes.append(f"{kind}: verifies={good}, bit-flip rejected={rejected}")
    record("8f certificate round trip", ok, "; ".join(notes))
    assert ok
