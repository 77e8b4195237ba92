"""Acceptance criteria, each at its stated tolerance and corpus size.

Each test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""
import json
import time

import numpy as np
import pytest

from nhom_lab import generators as gen
from nhom_lab.algebra import AlgebraDescriptor, _wrap, random_element
from nhom_lab.cli import main
from nhom_lab.harness import harris_grid
from nhom_lab.nhom import (
    coherent_factorization_check,
    from_orthogonal_homs,
    is_n_homomorphism,
    positive_nhom_check,
    random_domain_elements,
    split_involutive,
    unitize,
)
from nhom_lab.npotent import classify_selfadjoint_npotent, partition_of_unity
from nhom_lab.positivity import (
    choi_matrix,
    contractivity_check,
    cstar_identity_check,
    harris_solvability,
    is_completely_positive,
    spectral_inclusion_check,
)

SEED = 20240101
DOMAINS = [(1,), (2,), (1, 1), (2, 1), (3,), (1, 1, 1), (2, 2)]
CODOMAIN_MAX = 6
VERIFY = {"mode": "auto", "budget": 200_000, "trials": 100}


def rng_for(*key):
    return np.random.default_rng([SEED, *key])


def involutive_corpus(n, count=100):
    out = []
    for i in range(count):
        rng = rng_for(n, i)
        domain = AlgebraDescriptor.direct_sum(*DOMAINS[i % len(DOMAINS)])
        size = int(rng.integers(domain.dim, CODOMAIN_MAX + 1))
        parts, _ = gen.random_nhom_parts(domain, size, n, rng, involutive=True)
        out.append(from_orthogonal_homs(parts, n))
    return out


@pytest.fixture(scope="module")
def odd_corpus():
    return {n: involutive_corpus(n) for n in (3, 5, 7)}


@pytest.fixture(scope="module")
def even_corpus():
    return {n: involutive_corpus(n) for n in (2, 4, 6)}


def test_criterion_01_partition_of_unity(record):
    worst, count = 0.0, 0
    for n in range(2, 9):
        for d in range(2, 7):
            rng = rng_for(1, n, d)
            for _ in range(100):
                e = random_element(AlgebraDescriptor.full(d), "npotent", rng, n=n)
                part = partition_of_unity(e, n, 1e-8)
                worst = max(worst, *part.residuals.values())
                count += 1
    ok = worst <= 1e-8
    record(1, "partition of unity", ok, f"{count} n-potents, max residual {worst:.2e} <= 1e-8")
    assert ok


def test_criterion_02_selfadjoint_classification(record):
    worst_even, worst_odd, count = 0.0, 0.0, 0
    for n in range(2, 9):
        rng = rng_for(2, n)
        for i in range(100):
            d = int(rng.integers(2, 7))
            e = random_element(AlgebraDescriptor.full(d), "selfadjoint-npotent", rng, n=n)
            res = classify_selfadjoint_npotent(e, n, 1e-9)
            r = res.residuals
            if n % 2 == 0:
                worst_even = max(worst_even, r["idempotency"], r["self_adjoint"])
            else:
                worst_odd = max(worst_odd, r["p1_idempotency"], r["p2_idempotency"], r["p1_self_adjoint"],
                                r["p2_self_adjoint"], r["orthogonality"], r["reconstruction"])
            count += 1
    ok = max(worst_even, worst_odd) <= 1e-9
    record(2, "self-adjoint n-potent classification", ok,
           f"{count} elements, even {worst_even:.2e}, odd {worst_odd:.2e} <= 1e-9")
    assert ok


def test_criterion_03_even_case(record, even_corpus):
    worst_mult, worst_choi, count = 0.0, 0.0, 0
    for n, maps in even_corpus.items():
        for phi in maps:
            worst_mult = max(worst_mult, is_n_homomorphism(phi, 2, 1e-8, mode="exhaustive").max_residual)
            c = choi_matrix(phi)
            worst_choi = max(worst_choi, -c.min_eigenvalue() / max(c.norm(), np.finfo(float).tiny))
            count += 1
    ok = worst_mult <= 1e-8 and worst_choi <= 1e-8
    record(3, "even n: *-homomorphism and completely positive", ok,
           f"{count} maps, 2-mult {worst_mult:.2e}, Choi deficit {max(worst_choi, 0):.2e}")
    assert ok


def test_criterion_04_odd_case(record, odd_corpus):
    worst_orth, worst_rec, non_cp, count = 0.0, 0.0, 0, 0
    for n, maps in odd_corpus.items():
        for phi in maps:
            res = split_involutive(phi, n, 1e-9, **VERIFY)
            worst_orth = max(worst_orth, res.residuals["orthogonality"])
            worst_rec = max(worst_rec, res.residuals["reconstruction"])
            non_cp += not is_completely_positive(phi, 1e-9)
            count += 1
    ok = worst_orth <= 1e-9 and worst_rec <= 1e-8 and non_cp >= 1
    record(4, "odd n: difference of orthogonal *-homomorphisms", ok,
           f"{count} maps, orth {worst_orth:.2e}, recon {worst_rec:.2e}, {non_cp} not CP")
    assert ok


def test_criterion_05_contractivity(record, odd_corpus, even_corpus):
    worst, count = 0.0, 0
    for corpus in (even_corpus, odd_corpus):
        for n, maps in corpus.items():
            for i, phi in enumerate(maps[:20]):
                rep = contractivity_check(phi, n, 1000, 1e-8, rng_for(5, n, i))
                worst = max(worst, rep.max_ratio)
                count += 1
    ok = worst <= 1 + 1e-8
    record(5, "norm contractivity", ok, f"{count} maps x 1000 samples, max ratio 1 + {worst - 1:.2e}")
    assert ok


def test_criterion_06_cstar_identities(record):
    rng = rng_for(6)
    worst = 0.0
    for _ in range(500):
        x = random_element(AlgebraDescriptor.full(5), "ginibre", rng)
        for k in range(1, 5):
            r = cstar_identity_check(x, k, 1e-9)
            worst = max(worst, r["even"]["relative_error"], r["odd"]["relative_error"])
    ok = worst <= 1e-9
    record(6, "generalized C*-identities", ok, f"500 x 4 checks, max relative error {worst:.2e}")
    assert ok


def test_criterion_07_harris_dichotomy(record):
    rng = rng_for(7)
    checked, disagreements = 0, 0
    for i in range(50):
        d = int(rng.integers(2, 7))
        k = 1 + i % 3
        a = random_element(AlgebraDescriptor.full(d), "ginibre", rng)
        power = np.linalg.matrix_power(a.matrix.conj().T @ a.matrix, k)
        eigs = np.linalg.eigvalsh((power + power.conj().T) / 2)
        for lam in harris_grid(eigs):
            r = harris_solvability(a, lam, k, 1e-7)
            disagreements += r.solvable != (r.distance > 1e-7)
            checked += 1
    ok = disagreements == 0
    record(7, "Harris solvability dichotomy", ok, f"{checked} (a, lambda) pairs, {disagreements} disagreements")
    assert ok


def test_criterion_08_spectral_inclusion(record, odd_corpus):
    failures, worst, count = 0, 0.0, 0
    for n, maps in odd_corpus.items():
        for i, phi in enumerate(maps):
            for a in random_domain_elements(phi.domain, 50, rng_for(8, n, i)):
                r = spectral_inclusion_check(phi, _wrap(phi.domain, a), n, 1e-7)
                failures += not r.inclusion_holds
                worst = max(worst, r.max_unmatched_distance)
                count += 1
    ok = failures == 0
    record(8, "spectral inclusion", ok, f"{count} elements, max unmatched distance {worst:.2e}")
    assert ok


def test_criterion_09_coherent_factorization(record, odd_corpus, even_corpus):
    worst, max_gap, count = 0.0, 0.0, 0
    for corpus in (even_corpus, odd_corpus):
        for n, maps in corpus.items():
            for i, phi in enumerate(maps):
                for k in range(2, n):
                    rep = coherent_factorization_check(phi, n, k, trials=3, tol=1e-9, seed=rng_for(9, n, i, k))
                    worst = max(worst, rep.max_residual)
                    max_gap = max(max_gap, rep.details["gap"])
                    count += 1
    ok = worst <= 1e-9
    record(9, "coherent factorization", ok,
           f"{count} (map, k) pairs, residual {worst:.2e}, padded-product gap up to {max_gap:.2f}")
    assert ok


def test_criterion_10_counterexamples(record):
    notes = []
    ok = True
    # unitization of a negated unital representation
    for i, blocks in enumerate(DOMAINS[:4]):
        psi = gen.unital_star_representation(AlgebraDescriptor.direct_sum(*blocks), rng_for(10, i))
        phi = -psi
        ok &= is_n_homomorphism(phi, 3, 1e-9, mode="exhaustive").passed
        rep = is_n_homomorphism(unitize(phi), 3, 1e-9, mode="exhaustive")
        ok &= (not rep.passed) and rep.witness is not None
        if i == 0:
            notes.append(f"unitization witness {rep.witness}")
        # -psi is a 3-homomorphism that is not positive
        pos = positive_nhom_check(phi, 3, 1e-9, trials=20, seed=i)
        ok &= not pos.positive and not is_completely_positive(phi)
    # random linear maps on nilpotent algebras
    worst = 0.0
    for m in range(2, 6):
        for j in range(10):
            rng = rng_for(10, m, j)
            dom = AlgebraDescriptor.nilpotent(m)
            cod = AlgebraDescriptor.nilpotent(int(rng.integers(2, m + 1)))
            rep = is_n_homomorphism(gen.random_linear_map(dom, cod, rng), m, 1e-9, mode="exhaustive")
            worst = max(worst, rep.max_residual)
    ok &= worst == 0.0
    notes.append(f"nilpotent max residual {worst}")
    record(10, "counterexample demonstrations", bool(ok), "; ".join(notes))
    assert ok


def test_criterion_11_determinism(record, tmp_path, monkeypatch, capsys):
    start = time.perf_counter()
    outs = []
    for i, threads in enumerate(("1", "4")):
        monkeypatch.setenv("NHOM_LAB_THREADS", threads)
        path = tmp_path / f"report{i}.json"
        code = main(["verify", "--seed", "7", "--no-timings", "--out", str(path)])
        outs.append((code, path.read_bytes()))
    capsys.readouterr()
    doc = json.loads(outs[0][1])
    ok = outs[0][1] == outs[1][1] and outs[0][0] == 0 and doc["all_pass"]
    record(11, "byte-reproducible verify", ok,
           f"{len(doc['reports'])} theorems, identical across thread counts, {time.perf_counter() - start:.1f}s")
    assert ok
