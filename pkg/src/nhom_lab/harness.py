"""Seeded, reproducible theorem-verification harness.

Each theorem id owns a suite that draws instances from the generators and
runs the matching checks. Instance seeds come from
``SeedSequence(seed, spawn_key=(theorem_index, instance_index))`` so a
suite's results do not depend on which other suites run, nor on the
thread count.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import generators as gen
from .algebra import AlgebraDescriptor, _wrap, is_positive, random_element
from .exceptions import InvalidInput, NhomLabError
from .io import element_to_dict, map_to_dict
from .nhom import (
    decompose_full,
    from_orthogonal_homs,
    is_n_homomorphism,
    is_star_linear,
    positive_nhom_check,
    coherent_factorization_check,
    random_domain_elements,
    split_involutive,
    unitize,
)
from .npotent import classify_selfadjoint_npotent, partition_of_unity, roots_sigma
from .positivity import (
    amplify,
    choi_matrix,
    contractivity_check,
    cstar_identity_check,
    harris_solvability,
    spectral_inclusion_check,
)

THEOREMS = ("A4", "A6", "A8", "L22", "T23", "L24", "T25", "L31", "T32", "T41", "C42", "L43",
            "unitization-demo", "nilpotent-demo")

DESCRIPTIONS = {
    "A4": "n-potent e splits into an n-partition of unity with e = sum w_k e_k",
    "A6": "unital n-homomorphisms are sums of orthogonal homomorphisms weighted by roots",
    "A8": "self-adjoint n-potents are projections (n even) or differences of orthogonal projections (n odd)",
    "L22": "matrix amplifications of (involutive) n-homomorphisms are (involutive) n-homomorphisms",
    "T23": "involutive n-homomorphisms with n even are completely positive",
    "L24": "||x||^(2k) = ||(x*x)^k|| and ||x||^(2k+1) = ||x (x*x)^k||",
    "T25": "involutive n-homomorphisms with n even are norm contractive",
    "L31": "c (lambda - (a*a)^k) = a is solvable iff lambda is outside the spectrum",
    "T32": "odd n: spectral inclusion and norm contractivity",
    "T41": "involutive n-homomorphisms are *-homomorphisms (n even) or differences psi_1 - psi_2 (n odd)",
    "C42": "positive n-homomorphisms are exactly the *-homomorphisms",
    "L43": "image products of two factorizations of the same element agree",
    "unitization-demo": "the unitization of a 3-homomorphism need not be a 3-homomorphism",
    "nilpotent-demo": "every linear map between algebras with A^m = B^m = 0 is an m-homomorphism",
}


@dataclass
class HarnessConfig:
    """Harness parameters.

    ``trials`` is the number of instances per (theorem, n) pair,
    ``samples`` the per-instance sample count for sampling checks,
    ``codomain_dim`` the largest codomain matrix size and ``budget`` the
    exhaustive-verification tuple budget before switching to randomized mode.
    """

    seed: int = 20240101
    n_values: list = field(default_factory=lambda: [2, 3, 4, 5, 6, 7])
    dims: list = field(default_factory=lambda: [[2], [1, 1], [2, 1]])
    trials: int = 10
    tol: float = 1e-8
    theorems: list = field(default_factory=lambda: list(THEOREMS))
    samples: int = 200
    codomain_dim: int = 6
    budget: int = 200_000

    def __post_init__(self):
        self.seed = int(self.seed) % (1 << 64)
        self.n_values = [int(n) for n in self.n_values]
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise InvalidInput("n_values must be a non-empty list of integers >= 2")
        self.dims = [[int(d) for d in blocks] for blocks in self.dims]
        if not self.dims or any(not blocks or min(blocks) < 1 for blocks in self.dims):
            raise InvalidInput("dims must be a non-empty list of non-empty block-size lists")
        if int(self.trials) < 1 or int(self.samples) < 1:
            raise InvalidInput("trials and samples must be positive")
        self.trials, self.samples = int(self.trials), int(self.samples)
        self.tol = float(self.tol)
        if not self.tol >= 0:
            raise InvalidInput("tol must be non-negative")
        unknown = [t for t in self.theorems if t not in THEOREMS]
        if unknown:
            raise InvalidInput(f"unknown theorem ids: {unknown}")
        self.theorems = [t for t in THEOREMS if t in self.theorems]
        self.codomain_dim = int(self.codomain_dim)
        if self.codomain_dim < min(min(b) for b in self.dims):
            raise InvalidInput("codomain_dim is too small for the requested domains")
        self.budget = int(self.budget)

    @classmethod
    def from_dict(cls, data: dict) -> "HarnessConfig":
        if not isinstance(data, dict):
            raise InvalidInput("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise InvalidInput(f"unknown config fields: {sorted(extra)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"invalid config: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TheoremReport:
    theorem: str
    instances: int
    passed: int
    max_residual: float
    witness: Optional[dict] = None
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed == self.instances and not self.details.get("suite_failure")

    def to_dict(self, timings: bool = True) -> dict:
        out = {"theorem": self.theorem, "description": DESCRIPTIONS[self.theorem],
               "pass": self.ok, "instances": self.instances, "passed": self.passed,
               "max_residual": self.max_residual, "witness": self.witness,
               "details": self.details}
        if timings:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class Outcome:
    passed: bool
    residual: float
    witness: Optional[dict] = None
    extra: dict = field(default_factory=dict)


def instance_rng(seed: int, theorem: str, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(THEOREMS.index(theorem), index))
    return np.random.default_rng(ss)


def _domain(cfg: HarnessConfig, j: int) -> AlgebraDescriptor:
    return AlgebraDescriptor.direct_sum(*cfg.dims[j % len(cfg.dims)])


def _codomain_size(cfg: HarnessConfig, domain: AlgebraDescriptor, rng) -> int:
    hi = cfg.codomain_dim
    lo = max(min(domain.blocks), min(domain.dim, hi))
    return int(rng.integers(lo, hi + 1))


def _verify_kwargs(cfg: HarnessConfig, rng) -> dict:
    return {"mode": "auto", "budget": cfg.budget, "trials": cfg.samples,
            "seed": int(rng.integers(1 << 32))}


def _involutive_instance(cfg, n, j, rng):
    domain = _domain(cfg, j)
    size = _codomain_size(cfg, domain, rng)
    parts, table = gen.random_nhom_parts(domain, size, n, rng, involutive=True)
    return from_orthogonal_homs(parts, n), parts


def _map_witness(phi, **info) -> dict:
    out = dict(info)
    out["map"] = map_to_dict(phi)
    return out


# -- suites -----------------------------------------------------------------


def _suite_a4(cfg, n, j, rng):
    domain = _domain(cfg, j)
    e = random_element(domain, "npotent", rng, n=n)
    part = partition_of_unity(e, n, cfg.tol)
    # independent route: spectral projectors from an eigendecomposition
    w, v = np.linalg.eig(e.matrix)
    vinv = np.linalg.inv(v)
    roots = np.array(roots_sigma(n).roots)
    nearest = np.argmin(np.abs(w[:, None] - roots[None, :]), axis=1)
    unique = 0.0
    for k in range(n):
        proj = (v * (nearest == k)) @ vinv
        unique = max(unique, float(np.linalg.norm(proj - part[k].matrix, 2)))
    residuals = dict(part.residuals, uniqueness=unique)
    worst = max(residuals.values())
    ok = worst <= cfg.tol
    return Outcome(ok, worst, None if ok else {"n": n, "element": element_to_dict(e), "residuals": residuals})


def _suite_a6(cfg, n, j, rng):
    domain = _domain(cfg, j)
    size = _codomain_size(cfg, domain, rng)
    parts, _ = gen.random_nhom_parts(domain, size, n, rng, involutive=False)
    phi = from_orthogonal_homs(parts, n)
    rep = is_n_homomorphism(phi, n, cfg.tol, **_verify_kwargs(cfg, rng))
    result = decompose_full(phi, n, cfg.tol, check=False)
    match = max(float(np.max(np.abs(p.matrix - q.matrix), initial=0.0))
                for p, q in zip(result.parts, parts))
    worst = max(match, rep.max_residual, max(result.residuals.values()))
    ok = rep.passed and worst <= cfg.tol
    return Outcome(ok, worst, None if ok else _map_witness(phi, n=n, match=match, report=rep.to_dict()))


def _suite_a8(cfg, n, j, rng):
    domain = _domain(cfg, j)
    e = random_element(domain, "selfadjoint-npotent", rng, n=n)
    result = classify_selfadjoint_npotent(e, n, cfg.tol)
    worst = max(result.residuals.values())
    ok = worst <= cfg.tol
    if n % 2 == 0:
        ok = ok and is_positive(e, cfg.tol)
    return Outcome(ok, worst, None if ok else {"n": n, "element": element_to_dict(e)})


def _suite_l22(cfg, n, j, rng):
    phi, _ = _involutive_instance(cfg, n, j, rng)
    k = 1 + j % 3
    amp = amplify(phi, k)
    rep = is_n_homomorphism(amp, n, cfg.tol, **_verify_kwargs(cfg, rng))
    star = is_star_linear(amp, cfg.tol)
    ok = rep.passed and star
    return Outcome(ok, rep.max_residual,
                   None if ok else _map_witness(phi, n=n, k=k, report=rep.to_dict(), star_linear=star),
                   {"mode": rep.mode})


def _suite_t23(cfg, n, j, rng):
    phi, _ = _involutive_instance(cfg, n, j, rng)
    mult = is_n_homomorphism(phi, 2, cfg.tol, mode="exhaustive")
    choi = choi_matrix(phi)
    scale = max(1.0, choi.norm())
    deficit = max(0.0, -choi.min_eigenvalue() / scale)
    worst = max(mult.max_residual, deficit, choi.hermitian_defect() / scale)
    ok = worst <= cfg.tol
    return Outcome(ok, worst, None if ok else _map_witness(phi, n=n, choi_min=choi.min_eigenvalue()))


def _suite_l24(cfg, n, j, rng):
    d = sum(cfg.dims[j % len(cfg.dims)])
    x = random_element(AlgebraDescriptor.full(max(d, 2)), "ginibre", rng)
    k = 1 + j % 4
    rep = cstar_identity_check(x, k, cfg.tol)
    worst = max(rep["even"]["relative_error"], rep["odd"]["relative_error"])
    ok = worst <= cfg.tol
    return Outcome(ok, worst, None if ok else {"element": element_to_dict(x), "k": k})


def _contractivity(cfg, n, j, rng):
    phi, _ = _involutive_instance(cfg, n, j, rng)
    rep = contractivity_check(phi, n, cfg.samples, cfg.tol, rng)
    excess = max(0.0, rep.max_ratio - 1.0)
    return phi, rep, excess


def _suite_t25(cfg, n, j, rng):
    phi, rep, excess = _contractivity(cfg, n, j, rng)
    return Outcome(rep.passed, excess, None if rep.passed else _map_witness(phi, n=n, report=rep.to_dict()),
                   {"max_ratio": rep.max_ratio})


def harris_grid(spectrum: np.ndarray) -> list:
    """Lambda values on, near and between the spectrum, plus off-axis points."""
    top = float(np.max(spectrum)) if spectrum.size else 1.0
    grid = []
    for mu in spectrum:
        grid += [mu, mu + 1e-3 * max(1.0, top), mu - 1e-3 * max(1.0, top), mu + 0.5j]
    grid += list(np.linspace(-1.0, top + 1.0, 9))
    return [complex(x) for x in grid if abs(x) > 1e-3]


def _suite_l31(cfg, n, j, rng):
    d = sum(cfg.dims[j % len(cfg.dims)])
    a = random_element(AlgebraDescriptor.full(max(d, 2)), "ginibre", rng)
    k = 1 + j % 3
    m = a.matrix
    power = np.linalg.matrix_power(m.conj().T @ m, k)
    eigs = np.linalg.eigvalsh((power + power.conj().T) / 2)
    disagreements, worst_res = [], 0.0
    for lam in harris_grid(eigs):
        res = harris_solvability(a, lam, k, cfg.tol)
        if res.solvable != (res.distance > cfg.tol):
            disagreements.append({"lambda": [lam.real, lam.imag], "distance": res.distance,
                                  "residual": res.residual})
        if res.solvable:
            worst_res = max(worst_res, res.residual)
    ok = not disagreements
    return Outcome(ok, worst_res, None if ok else {"element": element_to_dict(a), "k": k,
                                                   "disagreements": disagreements})


def _suite_t32(cfg, n, j, rng):
    phi, rep, excess = _contractivity(cfg, n, j, rng)
    elements = random_domain_elements(phi.domain, 50, rng)
    worst_dist = 0.0
    inclusion = True
    for a in elements:
        sr = spectral_inclusion_check(phi, _wrap(phi.domain, a), n, 1e-7)
        worst_dist = max(worst_dist, sr.max_unmatched_distance)
        inclusion = inclusion and sr.inclusion_holds
    ok = inclusion and rep.passed
    return Outcome(ok, max(worst_dist, excess),
                   None if ok else _map_witness(phi, n=n, contractivity=rep.to_dict(), inclusion=inclusion),
                   {"max_ratio": rep.max_ratio})


def _suite_t41(cfg, n, j, rng):
    phi, _ = _involutive_instance(cfg, n, j, rng)
    result = split_involutive(phi, n, cfg.tol, **_verify_kwargs(cfg, rng))
    worst = max(result.residuals.values())
    cp = choi_matrix(phi)
    non_cp = cp.min_eigenvalue() < -cfg.tol * max(1.0, cp.norm())
    ok = worst <= cfg.tol
    return Outcome(ok, worst, None if ok else _map_witness(phi, n=n, residuals=result.residuals),
                   {"non_cp": bool(non_cp), "odd": n % 2 == 1})


def _suite_c42(cfg, n, j, rng):
    phi, _ = _involutive_instance(cfg, n, j, rng)
    if j % 2:
        # a *-homomorphism for comparison
        phi = gen.random_star_homomorphism(phi.domain, phi.codomain.dim, rng)
    res = positive_nhom_check(phi, n, cfg.tol, trials=min(cfg.samples, 50), seed=rng)
    ok = res.agrees
    return Outcome(ok, 0.0 if ok else 1.0, None if ok else _map_witness(phi, n=n, result=res.to_dict()),
                   {"positive": res.positive})


def _suite_l43(cfg, n, j, rng):
    phi, _ = _involutive_instance(cfg, n, j, rng)
    k = 2 + j % (n - 2)
    rep = coherent_factorization_check(phi, n, k, trials=5, tol=1e-9, seed=rng)
    return Outcome(rep.passed, rep.max_residual,
                   None if rep.passed else _map_witness(phi, n=n, k=k, report=rep.to_dict()),
                   {"gap": rep.details["gap"]})


def _suite_unitization(cfg, n, j, rng):
    domain = _domain(cfg, j)
    psi = gen.unital_star_representation(domain, rng)
    phi = -psi
    base = is_n_homomorphism(phi, 3, cfg.tol, mode="auto", budget=cfg.budget)
    plus = unitize(phi)
    rep = is_n_homomorphism(plus, 3, cfg.tol, mode="auto", budget=cfg.budget)
    # the predicted failure of 3-multiplicativity is the expected outcome
    ok = base.passed and not rep.passed and rep.witness is not None
    return Outcome(ok, base.max_residual, None if ok else _map_witness(plus, report=rep.to_dict()),
                   {"unitization_defect": rep.max_residual, "unitization_witness": rep.witness})


def _suite_nilpotent(cfg, m, j, rng):
    domain = AlgebraDescriptor.nilpotent(m)
    codomain = AlgebraDescriptor.nilpotent(int(rng.integers(2, m + 1)))
    phi = gen.random_linear_map(domain, codomain, rng)
    rep = is_n_homomorphism(phi, m, cfg.tol, mode="exhaustive", budget=max(cfg.budget, 10 ** 6))
    two = is_n_homomorphism(phi, 2, cfg.tol, mode="exhaustive")
    ok = rep.max_residual == 0.0
    return Outcome(ok, rep.max_residual, None if ok else _map_witness(phi, m=m, report=rep.to_dict()),
                   {"is_homomorphism": two.passed})


def _cases(theorem: str, cfg: HarnessConfig) -> list:
    ns = cfg.n_values
    if theorem in ("T23", "T25"):
        ns = [n for n in ns if n % 2 == 0]
    elif theorem == "T32":
        ns = [n for n in ns if n % 2 == 1]
    elif theorem == "L43":
        ns = [n for n in ns if n >= 3]
    elif theorem in ("L24", "L31", "unitization-demo"):
        ns = [3]
    elif theorem == "nilpotent-demo":
        ns = sorted({n for n in ns if 2 <= n <= 5}) or [3]
    return [(n, j) for n in ns for j in range(cfg.trials)]


SUITES = {
    "A4": _suite_a4, "A6": _suite_a6, "A8": _suite_a8, "L22": _suite_l22, "T23": _suite_t23,
    "L24": _suite_l24, "T25": _suite_t25, "L31": _suite_l31, "T32": _suite_t32, "T41": _suite_t41,
    "C42": _suite_c42, "L43": _suite_l43, "unitization-demo": _suite_unitization,
    "nilpotent-demo": _suite_nilpotent,
}


def run_theorem(theorem: str, cfg: HarnessConfig) -> TheoremReport:
    start = time.perf_counter()
    outcomes = []
    for i, (n, j) in enumerate(_cases(theorem, cfg)):
        rng = instance_rng(cfg.seed, theorem, i)
        try:
            out = SUITES[theorem](cfg, n, j, rng)
        except NhomLabError as exc:
            out = Outcome(False, float("inf"), {"n": n, "error": f"{type(exc).__name__}: {exc}"})
        out.extra.setdefault("n", n)
        outcomes.append(out)
    passed = sum(o.passed for o in outcomes)
    finite = [o.residual for o in outcomes if np.isfinite(o.residual)]
    max_residual = max(finite) if finite else 0.0
    if len(finite) < len(outcomes):
        max_residual = float("inf")
    failures = [(i, o) for i, o in enumerate(outcomes) if not o.passed]
    witness = None
    if failures:
        i, o = max(failures, key=lambda t: t[1].residual)
        witness = dict(o.witness or {}, instance=i)
    details = _summarise(theorem, outcomes)
    return TheoremReport(theorem, len(outcomes), passed, float(max_residual), witness,
                         time.perf_counter() - start, details)


def _summarise(theorem: str, outcomes: list) -> dict:
    details = {}
    if theorem in ("T25", "T32"):
        details["max_ratio"] = max((o.extra["max_ratio"] for o in outcomes), default=None)
    if theorem == "T41":
        odd = [o for o in outcomes if o.extra.get("odd")]
        details["non_cp_instances"] = sum(o.extra["non_cp"] for o in outcomes)
        details["odd_instances"] = len(odd)
        if odd and not any(o.extra["non_cp"] for o in odd):
            details["suite_failure"] = "no odd-n instance without complete positivity"
    if theorem == "L22":
        details["modes"] = sorted({o.extra["mode"] for o in outcomes})
    if theorem == "L43":
        details["max_gap"] = max((o.extra["gap"] for o in outcomes), default=0.0)
    if theorem == "C42":
        details["positive_instances"] = sum(o.extra["positive"] for o in outcomes)
    if theorem == "unitization-demo" and outcomes:
        details["min_unitization_defect"] = min(o.extra["unitization_defect"] for o in outcomes)
        details["example_witness"] = outcomes[0].extra["unitization_witness"]
    if theorem == "nilpotent-demo":
        details["not_homomorphisms"] = sum(not o.extra["is_homomorphism"] for o in outcomes)
    return details


def thread_count() -> int:
    raw = os.environ.get("NHOM_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def run_harness(cfg: HarnessConfig, threads: int | None = None) -> list:
    """Run every configured suite; reports come back in theorem order."""
    threads = thread_count() if threads is None else max(1, int(threads))
    if threads == 1 or len(cfg.theorems) == 1:
        return [run_theorem(t, cfg) for t in cfg.theorems]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: run_theorem(t, cfg), cfg.theorems))


def harness_document(cfg: HarnessConfig, reports: list, timings: bool = True) -> dict:
    return {
        "config": cfg.to_dict(),
        "all_pass": all(r.ok for r in reports),
        "reports": [r.to_dict(timings) for r in reports],
    }
