"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -m acceptance -s`` or ``python tests/test_acceptance.py``.
Every criterion is seeded, so reruns are exact.
"""

import sys
import time
from collections import Counter
from itertools import product as iproduct
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qposet import io  # noqa: E402
from qposet.constructions import classical_embed_poset, classical_function  # noqa: E402
from qposet.homobj import classical_power_poset, grid_order, observable_to_function, spectral_leq  # noqa: E402
from qposet.oracles import dequantize, random_classical_poset, random_equivalence  # noqa: E402
from qposet.order import (  # noqa: E402
    find_nontrivial_symmetry,
    hom_conditions,
    hom_leq,
    is_equivalence,
    is_monotone,
    iso_characterizations,
    monotone_conditions,
)
from qposet.qrel import compose, dagger, identity, rel_eq, rel_leq  # noqa: E402

from strategies import hom_instance, iso_instance, monotone_instance, spec  # noqa: E402
import suites  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
pytestmark = pytest.mark.acceptance


class Tally:
    """Counts claims over instances; a claim fails on its first violation."""

    def __init__(self):
        self.n = 0
        self.claims = Counter()
        self.failures = Counter()
        self.first = {}

    def add(self, report: dict, where):
        self.n += 1
        for k, v in report.items():
            self.claims[k] += 1
            if not v:
                self.failures[k] += 1
                self.first.setdefault(k, where)

    @property
    def ok(self) -> bool:
        return self.n > 0 and not self.failures

    def detail(self) -> str:
        if self.ok:
            return f"{self.n} instances, {sum(self.claims.values())} claims, 0 violations"
        bad = "; ".join(f"{k} x{c} (first at {self.first[k]})" for k, c in self.failures.items())
        return f"{self.n} instances, violations: {bad}"


def report(num: int, title: str, ok: bool, detail: str, t0: float):
    line = f"[{'PASS' if ok else 'FAIL'}] {num}. {title}: {detail} ({time.time() - t0:.1f}s)"
    print(line, flush=True)
    return line


def emit(capsys, *args):
    if capsys is None:
        return report(*args)
    with capsys.disabled():
        print()
        return report(*args)


# -- criteria -------------------------------------------------------------------


def criterion_1():
    """Classical faithfulness, all maps between 100 random posets (≤ 5 elements)."""
    rng = np.random.default_rng(1001)
    posets = [
        random_classical_poset(int(rng.integers(1, 6)), rng, density=float(rng.uniform(0.2, 0.8)), prefix=f"p{i}_")
        for i in range(100)
    ]
    t = Tally()
    maps = 0
    for i, A in enumerate(posets):
        B = posets[(i + 1) % len(posets)]
        R, S = classical_embed_poset(A).order, classical_embed_poset(B).order
        ok_round = np.array_equal(dequantize(R, A.elements, A.elements), A.leq)
        for f in iproduct(range(len(B)), repeat=len(A)):
            F = classical_function(f, A.elements, B.elements)
            m = np.zeros((len(A), len(B)), dtype=bool)
            m[np.arange(len(A)), f] = True
            t.add(
                {
                    "monotone agrees": is_monotone(F, R, S) == A.is_monotone_map(B, f),
                    "map roundtrip": np.array_equal(dequantize(F, A.elements, B.elements), m),
                    "order roundtrip": ok_round,
                },
                (i, f),
            )
            maps += 1
    return t.ok, f"{len(posets)} posets, {maps} maps; " + t.detail()


def criterion_2():
    """Monotone (3), hom-order (4) and isomorphism (3) conditions agree on ≥ 500 instances each."""
    parts, ok = [], True
    for name, make, conds in (
        ("monotone", monotone_instance, monotone_conditions),
        ("hom", hom_instance, hom_conditions),
        ("iso", iso_instance, iso_characterizations),
    ):
        t, truth = Tally(), Counter()
        for seed in range(500):
            F, G, S = make(20_000 + seed)
            c = conds(F, G, S)
            truth[all(c.values())] += 1
            t.add({f"{name} conditions agree": len(set(c.values())) == 1}, seed)
        ok &= t.ok
        parts.append(f"{name}: {t.n} instances ({truth[True]} true/{truth[False]} false), {sum(t.failures.values())} disagreements")
    return ok, "; ".join(parts)


def criterion_3():
    """Nontrivial symmetries below 100 random equivalences E != I, both cases."""
    t, cases = Tally(), Counter()
    for seed in range(100):
        case = ("diagonal", "offdiagonal")[seed % 2]
        E = random_equivalence(spec(30_000 + seed), case=case)
        G = find_nontrivial_symmetry(E)
        if isinstance(G, str):
            t.add({"found a symmetry": False}, seed)
            continue
        I = identity(E.source)
        cases[case] += 1
        t.add(
            {
                "E is an equivalence, E != I": is_equivalence(E) and not rel_eq(E, I),
                "G∘G = I": rel_eq(compose(G, G), I),
                "G = G†": rel_eq(G, dagger(G)),
                "G <= E": rel_leq(G, E),
                "G != I": not rel_eq(G, I),
            },
            seed,
        )
    return t.ok and len(cases) == 2, f"cases {dict(cases)}; " + t.detail()


def criterion_4():
    """Limit order for jointly injective cones, mediators, classical oracle."""
    tq, tc = Tally(), Tally()
    for seed in range(100):
        tq.add(suites.check_limit(40_000 + seed), seed)
        tc.add(suites.check_classical_limit(41_000 + seed), seed)
    mediators = tq.claims["mediator monotone"]
    return tq.ok and tc.ok and mediators > 0, f"quantum {tq.detail()} ({mediators} mediators); classical {tc.detail()}"


def criterion_5():
    """Coproduct laws, coproduct embeddings, product certification, pairing orders."""
    t = Tally()
    for seed in range(200):
        for check in (
            suites.check_coproduct_laws,
            suites.check_coproduct_posets,
            suites.check_product,
            suites.check_tensor_order,
        ):
            t.add(check(50_000 + seed), (check.__name__, seed))
    per = min(t.claims.values())
    return t.ok and per >= 200, f"each claim on ≥ {per} instances; " + t.detail()


def criterion_6():
    """Largest hom-order: classical carriers vs brute force; 50 quantum carriers."""
    rng = np.random.default_rng(6006)
    tc = Tally()
    for i in range(60):
        A = random_classical_poset(int(rng.integers(1, 4)), rng, density=0.5, prefix="a")
        B = random_classical_poset(int(rng.integers(1, 4)), rng, density=0.5, prefix="b")
        tc.add(suites.check_classical_hom_order(A, B), i)
    tq, seed, empty = Tally(), 60_000, 0
    while tq.n < 50:
        rep = suites.check_quantum_hom_order(seed)
        if "empty carrier handled" in rep:
            empty += 1
        else:
            tq.add(rep, seed)
        seed += 1
    return tc.ok and tq.ok, f"classical {tc.detail()}; quantum {tq.detail()} ({empty} empty carriers skipped)"


def criterion_7():
    """Power set: F_R unique for all relations with |A|, |B| ≤ 3; down-set embeddings."""
    t = Tally()
    cache = {}
    for A, B, R in suites.all_classical_relations(3):
        pw = cache.setdefault(tuple(A), classical_power_poset(A))
        t.add(suites.check_power_set_relation(A, B, R, pw), (len(A), len(B)))
    rng = np.random.default_rng(7007)
    td = Tally()
    for i in range(50):
        P = random_classical_poset(int(rng.integers(1, 6)), rng, density=float(rng.uniform(0.2, 0.8)))
        td.add(suites.check_downset(P), i)
    return t.ok and td.ok, f"relations: {t.detail()}; down-sets: {td.detail()}"


def criterion_8():
    """Spectral order = hom order on 200 pairs; rotated projections incomparable."""
    t, truth = Tally(), Counter()
    for seed in range(200):
        a, b = suites.observable_pair(80_000 + seed)
        truth[spectral_leq(a, b)] += 1
        t.add(suites.check_spectral(80_000 + seed), seed)
    a = io.decode(io.load(FIXTURES / "obs_projection.json"))
    b = io.decode(io.load(FIXTURES / "obs_rotated.json"))
    L = grid_order(a.grid)
    Fa, Fb = observable_to_function(a), observable_to_function(b)
    incomparable = not (spectral_leq(a, b) or spectral_leq(b, a) or hom_leq(Fa, Fb, L) or hom_leq(Fb, Fa, L))
    ok = t.ok and incomparable
    return ok, f"{t.detail()} ({truth[True]} comparable/{truth[False]} not); rotated fixture incomparable: {incomparable}"


def criterion_9():
    """Relation algebra, marginal containment, trace-orthogonality on ≥ 200 instances."""
    parts, ok = [], True
    for name, check in (
        ("relation algebra", suites.check_relation_algebra),
        ("marginals", suites.check_marginals),
        ("trace/orthogonality", suites.check_trace_orthogonality),
    ):
        t = Tally()
        for seed in range(200):
            t.add(check(90_000 + seed), seed)
        ok &= t.ok
        parts.append(f"{name}: {t.detail()}")
    return ok, "; ".join(parts)


CRITERIA = [
    (1, "classical faithfulness", criterion_1),
    (2, "equivalent conditions agree", criterion_2),
    (3, "symmetry below an equivalence", criterion_3),
    (4, "limit order", criterion_4),
    (5, "coproduct and product laws", criterion_5),
    (6, "residuated hom-order", criterion_6),
    (7, "power-set adjunction (classical)", criterion_7),
    (8, "spectral order", criterion_8),
    (9, "relation algebra, marginals, trace", criterion_9),
]


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    t0 = time.time()
    ok, detail = fn()
    emit(capsys, num, title, ok, detail, t0)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for num, title, fn in CRITERIA:
        t0 = time.time()
        ok, detail = fn()
        report(num, title, ok, detail, t0)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
