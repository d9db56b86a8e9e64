import numpy as np
import pytest
from hypothesis import given

from qposet.constructions import ClassicalPoset, classical_embed, classical_embed_poset, classical_function
from qposet.errors import SamplingError, ShapeError
from qposet.oracles import (
    MAX_MAPS,
    RandomSpec,
    all_maps,
    brute_force_pointwise_order,
    classical_limit_oracle,
    dequantize,
    random_bijection,
    random_carrier,
    random_classical_poset,
    random_equivalence,
    random_function,
    random_observable,
    random_order,
    random_quantum_set,
)
from qposet.order import check_equivalence, classify_function, is_monotone, is_order
from qposet.qrel import QuantumSet, identity, rel_eq

from strategies import classical_posets, rng_of, seeds, spec


# -- dequantize ---------------------------------------------------------------


def test_dequantize_identity():
    X = QuantumSet.classical(["a", "b", "c"])
    assert np.array_equal(dequantize(identity(X)), np.eye(3, dtype=bool))


def test_dequantize_chain_is_upper_triangular():
    R = classical_embed_poset(ClassicalPoset.chain(3)).order
    assert np.array_equal(dequantize(R), np.triu(np.ones((3, 3), bool)))


def test_dequantize_rejects_quantum_atoms():
    with pytest.raises(ShapeError):
        dequantize(identity(QuantumSet({"h": 2})))


@given(seeds)
def test_dequantize_roundtrip(seed):
    rng = rng_of(seed)
    a, b = rng.integers(1, 5, size=2)
    A = [f"u{k}" for k in rng.permutation(a)]
    B = [f"v{k}" for k in rng.permutation(b)]
    r = rng.random((a, b)) < 0.5
    assert np.array_equal(dequantize(classical_embed(r, A, B), A, B), r)


# -- brute force --------------------------------------------------------------


def test_brute_force_single_point_domain():
    A, B = ClassicalPoset.chain(1), ClassicalPoset.antichain(2)
    maps, P = brute_force_pointwise_order(A, B)
    assert maps == [(0,), (1,)] and np.array_equal(P.leq, np.eye(2, dtype=bool))


def test_brute_force_two_chain():
    C = ClassicalPoset.chain(2)
    maps, P = brute_force_pointwise_order(C, C)
    assert maps == [(0, 0), (0, 1), (1, 1)]
    assert np.array_equal(P.leq, np.triu(np.ones((3, 3), bool)))


def test_brute_force_two_antichain():
    A = ClassicalPoset.antichain(2)
    maps, P = brute_force_pointwise_order(A, A)
    assert len(maps) == 4 and np.array_equal(P.leq, np.eye(4, dtype=bool))


def test_all_maps_bound():
    with pytest.raises(ValueError):
        all_maps(ClassicalPoset.antichain(4), ClassicalPoset.antichain(3))
    assert len(all_maps(ClassicalPoset.chain(3), ClassicalPoset.chain(4))) == MAX_MAPS


@given(classical_posets(max_size=3), classical_posets(max_size=3))
def test_classical_monotone_agrees_with_quantum(A, B):
    R, S = classical_embed_poset(A).order, classical_embed_poset(B).order
    for f in all_maps(A, B):
        F = classical_function(f, A.elements, B.elements)
        assert is_monotone(F, R, S) == A.is_monotone_map(B, f)


def test_classical_limit_oracle_example():
    C = ClassicalPoset.chain(2)
    # two points, one leg collapsing them, one leg separating them
    leq = classical_limit_oracle([(0, 0), (1, 0)], [C, C], 2)
    assert np.array_equal(leq, np.array([[True, False], [True, True]]))


# -- generators ---------------------------------------------------------------


def test_random_spec_validation():
    with pytest.raises(ValueError):
        RandomSpec(density=1.5)
    assert RandomSpec(seed=3).derive(1) != RandomSpec(seed=3)


@given(seeds)
def test_generators_are_deterministic(seed):
    s = spec(seed)
    assert random_quantum_set(s) == random_quantum_set(s)
    assert rel_eq(random_order(s).order, random_order(s).order)


@given(seeds)
def test_random_classical_poset_is_poset(seed):
    rng = rng_of(seed)
    P = random_classical_poset(int(rng.integers(1, 6)), rng)
    assert is_order(classical_embed_poset(P).order)


@given(seeds)
def test_random_functions_are_certified(seed):
    s = spec(seed)
    X = random_quantum_set(s)
    B = random_bijection(s, X)
    assert classify_function(B).bijective
    Y = QuantumSet({"y": 1})
    F = random_function(s, X, Y)
    assert classify_function(F).is_function and F.surjective


def test_random_function_incompatible_dims():
    s = spec(0)
    with pytest.raises(SamplingError):
        random_function(s, QuantumSet({"x": 1}), QuantumSet({"y": 2}))


@given(seeds)
def test_random_equivalence_cases(seed):
    E = random_equivalence(spec(seed), case="diagonal")
    assert check_equivalence(E)
    assert any(E.components[(x, x)].dim > 1 for x in E.source.ids)
    E = random_equivalence(spec(seed), case="offdiagonal")
    assert all(E.components[(x, x)].dim == 1 for x in E.source.ids)
    assert any(v.dim for (x, y), v in E.nonzero() if x != y)


@given(seeds)
def test_random_observable_on_grid(seed):
    rng = rng_of(seed)
    a = random_observable(3, (0.0, 0.5, 1.0), rng)
    assert sum(p.shape[1] for p in a.spectral_projections().values()) == 3


@given(seeds)
def test_random_carrier_eval_is_function(seed):
    c = random_carrier(spec(seed, max_atoms=2))
    assert classify_function(c.eval).is_function
