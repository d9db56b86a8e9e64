"""Small hand-checkable instances, one per documented example."""

import numpy as np
from hypothesis import given

from qposet.constructions import (
    ClassicalPoset,
    Cone,
    classical_embed,
    classical_embed_poset,
    classical_function,
    coproduct_posets,
    limit_order,
    opposite,
    pairing,
    product_posets,
    projections,
    pullback_order,
)
from qposet.homobj import (
    FiniteFunctionCarrier,
    Observable,
    classical_function_carrier,
    classical_power_poset,
    downset_embedding_classical,
    is_upset,
    largest_hom_order,
    ptilde,
    ptilde_maximality,
    relation_to_indicator,
    spectral_leq,
)
from qposet.oracles import (
    RandomSpec,
    brute_force_pointwise_order,
    dequantize,
    random_codomain,
    random_function,
    random_order,
    random_quantum_set,
    random_relation,
)
from qposet.order import as_function, inclusion, is_order
from qposet.qrel import (
    ONE,
    BinaryRelation,
    QuantumSet,
    bottom,
    compose,
    compose_all,
    dagger,
    identity,
    product_rel,
    rel_eq,
    right_unitor,
    top,
)
from qposet.subspace import matrix_unit, span

from strategies import classical_posets, seeds, spec

H2 = QuantumSet({"h": 2})
UPPER = span([np.eye(2), matrix_unit(0, 1, 2)])


def upper_order():
    return BinaryRelation(H2, H2, {("h", "h"): UPPER})


def chain_rel(n, prefix=""):
    return classical_embed_poset(ClassicalPoset.chain(n, prefix)).order


# -- classical embedding, opposite, pullback --------------------------------------


def test_one_point_poset_is_trivial():
    R = classical_embed_poset(ClassicalPoset.chain(1)).order
    assert rel_eq(R, identity(R.source)) and rel_eq(R, top(R.source, R.source))


def test_opposite_of_trivial_and_chain():
    X = QuantumSet({"a": 1, "h": 2})
    assert rel_eq(opposite(identity(X)).order, identity(X))
    assert np.array_equal(dequantize(opposite(chain_rel(3)).order), np.tril(np.ones((3, 3), bool)))


def test_pullback_along_identity():
    S = upper_order()
    assert rel_eq(pullback_order(identity(H2), S).order, S)


def test_pullback_along_atom_inclusion_is_trivial():
    X = QuantumSet({"x1": 2, "x2": 3})
    full = span([matrix_unit(i, j, 3, 2) for i in range(3) for j in range(2)])
    R = BinaryRelation(
        X, X, {("x1", "x1"): [np.eye(2)], ("x2", "x2"): [np.eye(3)], ("x1", "x2"): full}
    )
    J = inclusion(X.restrict(["x1"]), X)
    assert rel_eq(pullback_order(J, R).order, identity(J.source))


def test_collapse_onto_antichain_gives_preorder():
    F = classical_function([0, 0], ["0", "1"], ["u", "v"])
    P = pullback_order(F, identity(QuantumSet.classical(["u", "v"])))
    assert not P.is_order and np.array_equal(dequantize(P.order), np.ones((2, 2), bool))


# -- coproducts and products ------------------------------------------------------


def test_coproduct_of_one_poset():
    R = upper_order()
    C, (J,) = coproduct_posets([R])
    assert rel_eq(compose_all(dagger(J), C.order, J), R) and J.bijective


def test_two_chains_side_by_side():
    C, _ = coproduct_posets([chain_rel(2), chain_rel(2)], tags=["l", "r"])
    assert C.carrier.ids == ("l:0", "l:1", "r:0", "r:1")
    want = np.zeros((4, 4), bool)
    want[:2, :2] = want[2:, 2:] = np.triu(np.ones((2, 2), bool))
    assert np.array_equal(dequantize(C.order), want)


def test_product_with_unit():
    R = upper_order()
    U = as_function(right_unitor(H2))
    RS = product_posets(R, identity(ONE)).order
    assert rel_eq(compose_all(U, RS, dagger(U)), R)


@given(classical_posets(max_size=3), classical_posets(max_size=3))
def test_classical_product_is_componentwise(A, B):
    B = ClassicalPoset([f"q{i}" for i in range(len(B))], B.leq)
    RS = product_posets(classical_embed_poset(A), classical_embed_poset(B)).order
    ids = [f"{a}⊗{b}" for a in A.elements for b in B.elements]
    want = np.kron(A.leq.astype(int), B.leq.astype(int)).astype(bool)
    assert np.array_equal(dequantize(RS, ids, ids), want)


def test_qubit_order_times_chain():
    assert product_posets(upper_order(), chain_rel(2)).is_order


def test_projection_is_coisometry_on_qubit_times_two():
    P, _ = projections(H2, QuantumSet.classical(["0", "1"]))
    assert rel_eq(compose(P, dagger(P)), identity(H2))


@given(seeds)
def test_projection_intertwines_product_order(seed):
    s = spec(seed, max_atoms=2)
    R, S = random_order(s).order, random_order(s.derive(1)).order
    S = BinaryRelation(
        QuantumSet({f"t{k}": d for k, d in S.source.atoms()}),
        QuantumSet({f"t{k}": d for k, d in S.source.atoms()}),
        {(f"t{x}", f"t{y}"): v for (x, y), v in S.components.items()},
    )
    P, Q = projections(R.source, S.source)
    RS = product_rel(R, S)
    assert rel_eq(compose(P, RS), compose(R, P)) and rel_eq(compose(Q, RS), compose(S, Q))


def test_classical_pairing_is_graph():
    W = ["a", "b", "c"]
    f = classical_function([0, 1, 1], W, ["u", "v"])
    g = classical_function([1, 1, 0], W, ["s", "t"])
    H = pairing(f, g)
    want = classical_function([1, 3, 2], W, ["u⊗s", "u⊗t", "v⊗s", "v⊗t"])
    assert rel_eq(H, want)


@given(seeds)
def test_pairing_of_projected_maps_is_product(seed):
    s = spec(seed, max_atoms=2)
    rng = s.rng()
    X, Y = random_quantum_set(s, rng, "a"), random_quantum_set(s, rng, "b")
    F = random_function(s, X, random_codomain(s, X, rng, "c"), rng=rng)
    G = random_function(s, Y, random_codomain(s, Y, rng, "d"), rng=rng)
    P, Q = projections(X, Y)
    H = pairing(compose(F, P), compose(G, Q))
    assert not isinstance(H, str) and rel_eq(H, product_rel(F, G))


# -- limits -----------------------------------------------------------------------


def test_single_identity_leg():
    R = upper_order()
    L = limit_order(Cone([identity(H2)], [R]))
    assert rel_eq(L.order, R) and L.is_order


def test_classical_product_cone():
    A, B = ClassicalPoset.chain(2, "a"), ClassicalPoset.antichain(2, "b")
    pts = [f"p{i}{j}" for i in range(2) for j in range(2)]
    legs = [classical_function([0, 0, 1, 1], pts, A.elements), classical_function([0, 1, 0, 1], pts, B.elements)]
    L = limit_order(Cone(legs, [classical_embed_poset(A).order, classical_embed_poset(B).order]))
    want = np.kron(A.leq.astype(int), B.leq.astype(int)).astype(bool)
    assert L.is_order and np.array_equal(dequantize(L.order, pts, pts), want)


# -- indicators and up-sets -------------------------------------------------------


def test_indicator_of_top_and_bottom():
    X = QuantumSet({"a": 1, "h": 2})
    one = relation_to_indicator(top(X, ONE)).q_tilde
    zero = relation_to_indicator(bottom(X, ONE)).q_tilde
    assert all(one.components[(x, "0")].is_zero and one.components[(x, "1")].dim for x in X.ids)
    assert all(zero.components[(x, "1")].is_zero and zero.components[(x, "0")].dim for x in X.ids)
    assert is_upset(top(X, ONE), identity(X))


def test_upset_from_diagonal_projection():
    R = upper_order()
    # E12 sends e2 to e1, so span{e1} is upward closed and span{e2} is not
    q = BinaryRelation(H2, ONE, {("h", "*"): [np.array([[1, 0]])]})
    assert is_upset(q, R)
    q = BinaryRelation(H2, ONE, {("h", "*"): [np.array([[0, 1]])]})
    assert not is_upset(q, R)


# -- hom-orders -------------------------------------------------------------------


def test_hom_order_from_the_unit_returns_target_order():
    T = upper_order()
    carrier = FiniteFunctionCarrier(H2, ONE, H2, as_function(right_unitor(H2)))
    H = largest_hom_order(carrier, identity(ONE), T)
    assert rel_eq(H.Q, T) and H.report["solver"] == "kernel"


@given(seeds)
def test_hom_order_from_unit_random(seed):
    P = random_order(spec(seed))
    X = P.carrier
    carrier = FiniteFunctionCarrier(X, ONE, X, as_function(right_unitor(X)))
    assert rel_eq(largest_hom_order(carrier, identity(ONE), P).Q, P.order)


def test_all_maps_with_trivial_source_order():
    C = ClassicalPoset.chain(2)
    carrier, _ = classical_function_carrier(C.elements, C.elements)
    H = largest_hom_order(carrier, identity(C.quantum_set), chain_rel(2))
    assert len(H.W) == 4 and not H.report["dropped"]
    maps = [tuple(int(c) for c in w[2:].split(",")) for w in H.W.ids]
    want = np.array([[all(f[i] <= g[i] for i in range(2)) for g in maps] for f in maps])
    assert np.array_equal(dequantize(H.Q), want)


# -- power sets -------------------------------------------------------------------


def test_power_set_of_empty_set():
    pw = classical_power_poset([])
    assert pw.subsets == ["{}"] and len(pw.membership.target) == 0


def test_full_relation_from_a_point():
    pw = classical_power_poset(["a", "b"])
    R = classical_embed([[True, True]], ["p"], ["a", "b"])
    F = pw.F_R(R)
    assert F.components[("p", "{a,b}")].dim == 1


@given(seeds)
def test_power_set_naturality(seed):
    rng = np.random.default_rng(seed)
    A, B, C = ["a0", "a1", "a2"], ["b0", "b1"], ["c0", "c1", "c2"]
    R = classical_embed(rng.random((2, 3)) < 0.5, B, A)
    S = classical_embed(rng.random((3, 3)) < 0.5, A, C)
    pw = classical_power_poset(A)
    lhs = compose(pw.direct_image(S), pw.F_R(R))
    rhs = classical_power_poset(C).F_R(compose(S, R))
    assert rel_eq(lhs, rhs)


def test_downset_examples():
    G, _ = downset_embedding_classical(ClassicalPoset.chain(1))
    assert G.components[("0", "{0}")].dim == 1
    G, _ = downset_embedding_classical(ClassicalPoset(["a", "b", "c"], np.triu(np.ones((3, 3), bool))))
    assert [y for (x, y), v in G.nonzero()] == ["{a}", "{a,b}", "{a,b,c}"]
    G, _ = downset_embedding_classical(ClassicalPoset.antichain(2))
    assert sorted(y for (x, y), v in G.nonzero()) == ["{0}", "{1}"]


# -- P̃ ----------------------------------------------------------------------------


def test_ptilde_on_the_unit():
    Pt = ptilde(identity(ONE))
    assert Pt.components[("*⊗**", "1")].dim == 1 and Pt.components[("*⊗**", "0")].is_zero


def test_ptilde_on_two_chain():
    Pt = ptilde(chain_rel(2))
    for a in "01":
        for b in "01":
            hit = Pt.components[(f"{a}⊗{b}*", "1")].dim == 1
            assert hit == (b <= a)


def test_ptilde_on_qubit_order():
    R = upper_order()
    lower = BinaryRelation(H2, H2, {("h", "h"): span([np.eye(2), matrix_unit(1, 0, 2)])})
    assert ptilde_maximality(R, R) == {"monotone": True, "T_leq_R": True}
    assert ptilde_maximality(R, identity(H2)) == {"monotone": True, "T_leq_R": True}
    assert ptilde_maximality(R, lower) == {"monotone": False, "T_leq_R": False}


# -- spectral order and oracles ---------------------------------------------------


def test_spectral_examples():
    a = Observable(np.diag([0.0, 0.0]), (0.0, 1.0))
    b = Observable(np.diag([1.0, 1.0]), (0.0, 1.0))
    assert spectral_leq(a, a) and spectral_leq(a, b) and not spectral_leq(b, a)


def test_max_dim_one_is_classical():
    P = random_order(RandomSpec(seed=4, max_dim=1))
    assert P.carrier.is_classical and is_order(P.order)


def test_brute_force_from_a_point():
    B = ClassicalPoset.chain(3)
    maps, P = brute_force_pointwise_order(ClassicalPoset.chain(1), B)
    assert maps == [(0,), (1,), (2,)] and np.array_equal(P.leq, B.leq)


def test_brute_force_antichain_into_chain():
    maps, P = brute_force_pointwise_order(ClassicalPoset.antichain(2), ClassicalPoset.chain(2))
    assert len(maps) == 4
    want = np.array([[all(f[i] <= g[i] for i in range(2)) for g in maps] for f in maps])
    assert np.array_equal(P.leq, want) and P.leq.sum() == 9


def test_random_relation_shapes():
    s = spec(3)
    X = random_quantum_set(s)
    R = random_relation(s, X, X)
    assert all(v.shape == (X.dim(y), X.dim(x)) for (x, y), v in R.components.items())
