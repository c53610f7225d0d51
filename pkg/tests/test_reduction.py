from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_force, contraction, random_chain, random_scheme, rng, seeds
from multiport import (
    ConnectionScheme,
    NetworkSystem,
    evaluate,
    evaluate_admittance,
    evaluate_impedance,
    iterative_cascade,
    plan_reduction,
    redheffer_star,
    s_from_y,
    s_from_z,
)
from multiport.errors import InvalidReduction, InvalidScheme, SingularInteraction
from multiport.metanet import build_meta_network
from multiport.reduction import make_plan, two_colouring


def _close(a, b, tol):
    return np.linalg.norm(a - b) <= tol * max(1.0, np.linalg.norm(b))


def triangle(seed=0):
    r = rng(seed)
    systems = {}
    for name, (x, y) in zip("XYZ", [("Y", "Z"), ("X", "Z"), ("X", "Y")]):
        systems[name] = NetworkSystem(contraction(r, 3), {"N": [0], x: [1], y: [2]})
    joins = [("X", "Y", "Y", "X"), ("X", "Z", "Z", "X"), ("Y", "Z", "Z", "Y")]
    return ConnectionScheme(systems, joins)


def test_meta_network_plan():
    mn = build_meta_network(2, seed=0)
    plan = plan_reduction(mn.scheme)
    assert plan.connection == ("D",)
    assert plan.supersystem == ("A", "B", "C")
    assert [(j.sys_a, j.sys_b) for j in plan.remaining_joins] == [("A", "B")]
    assert plan.requires_star and not plan.fully_reduced


def test_modified_meta_network_plan_uses_cascade_only():
    mn = build_meta_network(2, seed=0, modified=True)
    plan = plan_reduction(mn.scheme)
    assert plan.connection == ("D",)
    assert not plan.requires_star
    res, cache = evaluate(mn.scheme, plan)
    assert cache is not None and not cache.con.is_pure_permutation


def test_chain_fully_reduced():
    sch = random_chain(0, lengths=(1, 0, 0, 0, 1), sizes=(1, 1, 1, 1))
    plan = plan_reduction(sch)
    assert plan.fully_reduced
    assert set(plan.connection) in ({"S0", "S2", "S4"}, {"S1", "S3"})
    assert plan.remaining_joins == ()
    colour = two_colouring(sch)
    assert len({colour[n] for n in plan.connection}) == 1


def test_triangle_not_fully_reduced():
    sch = triangle()
    assert two_colouring(sch) is None
    plan = plan_reduction(sch)
    assert len(plan.connection) == 1 and not plan.fully_reduced
    np.testing.assert_allclose(evaluate(sch, plan)[0], brute_force(sch), atol=1e-12)


def test_objectives():
    mn = build_meta_network(1, seed=0, modified=True)
    assert plan_reduction(mn.scheme, "none").is_global
    p = plan_reduction(mn.scheme, "prefer-closed-ports")
    assert p.connection == ("D",)
    with pytest.raises(ValueError):
        plan_reduction(mn.scheme, "fastest")


def test_manual_override_and_adjacent_rejection():
    mn = build_meta_network(1, seed=0)
    sch = ConnectionScheme(mn.scheme.systems, mn.scheme.joins, embedded=["C"])
    assert plan_reduction(sch).connection == ("C",)
    with pytest.raises(InvalidReduction):
        make_plan(mn.scheme, ["A", "D"])


def test_isolated_system_is_passed_through():
    r = rng(1)
    a = NetworkSystem(contraction(r, 2), {"N": [0], "C": [1]})
    b = NetworkSystem(contraction(r, 2), {"N": [0], "C": [1]})
    lone = NetworkSystem(contraction(r, 2))
    sch = ConnectionScheme({"a": a, "lone": lone, "b": b}, [("a", "C", "b", "C")])
    res, _ = evaluate(sch)
    ref = brute_force(sch)
    np.testing.assert_allclose(res, ref, atol=1e-13)
    np.testing.assert_allclose(res[1:3, 1:3], lone.matrix)
    for plan in (plan_reduction(sch), None):
        np.testing.assert_allclose(evaluate(sch, plan)[0], ref, atol=1e-13)
    np.testing.assert_allclose(iterative_cascade(sch), ref, atol=1e-13)


@pytest.mark.parametrize("n_bus", [1, 2, 5])
def test_meta_network_methods_agree(n_bus):
    mn = build_meta_network(n_bus, seed=n_bus)
    ref = mn.oracle()[1].S
    g, _ = evaluate(mn.scheme)
    red, cache = evaluate(mn.scheme, plan_reduction(mn.scheme))
    it = iterative_cascade(mn.scheme)
    assert cache is None
    for x in (g, red, it):
        assert _close(x, ref, 1e-12)
    assert _close(g, red, 1e-12) and _close(g, it, 1e-12)


def test_two_system_global_matches_glued_graph():
    from multiport.graph import glue_graphs, graph_scattering, random_graph
    k = 3 + 0.05j
    g1, g2 = random_graph(5, seed=1, k_check=k), random_graph(3, seed=2, k_check=k)
    s1 = NetworkSystem(graph_scattering(g1, k).S, {"N": [0, 1, 2], "C": [3, 4]})
    s2 = NetworkSystem(graph_scattering(g2, k).S, {"C": [0, 1], "N": [2]})
    sch = ConnectionScheme({"g1": s1, "g2": s2}, [("g1", "C", "g2", "C")])
    glued = glue_graphs(g1, g2, [(3, 0), (4, 1)])
    ref = graph_scattering(glued, k).S
    assert _close(evaluate(sch)[0], ref, 1e-12)


def test_single_join_iterative_is_star():
    r = rng(2)
    U = NetworkSystem(contraction(r, 4), {"N": [0, 1], "C": [2, 3]})
    V = NetworkSystem(contraction(r, 3), {"C": [0, 1], "N": [2]})
    sch = ConnectionScheme({"u": U, "v": V}, [("u", "C", "v", "C")])
    np.testing.assert_allclose(iterative_cascade(sch), redheffer_star(U, V, "C", "C"),
                               atol=1e-15)


def test_fold_order_validation():
    sch = random_chain(1)
    with pytest.raises(InvalidScheme):
        iterative_cascade(sch, ["S0", "S1"])


@settings(max_examples=100, deadline=None)
@given(seeds, st.booleans())
def test_all_strategies_agree_with_brute_force(seed, symmetric):
    sch = random_scheme(seed, symmetric=symmetric)
    ref = brute_force(sch)
    tol = 1e-11
    g, cache = evaluate(sch)
    assert _close(g, ref, tol)
    assert cache.residual() < 1e-12
    assert _close(evaluate(sch, plan_reduction(sch))[0], ref, tol)
    assert _close(evaluate(sch, plan_reduction(sch, "prefer-closed-ports"))[0], ref, tol)
    names = list(sch.names)
    assert _close(iterative_cascade(sch), ref, tol)
    assert _close(iterative_cascade(sch, names[::-1]), ref, tol)
    if symmetric:
        assert np.linalg.norm(g - g.T) <= 1e-12 * max(1, np.linalg.norm(g))


@settings(max_examples=100, deadline=None)
@given(seeds, st.booleans())
def test_unitarity_closure(seed, symmetric):
    sch = random_scheme(seed, symmetric=symmetric, lossless=True)
    try:
        g, _ = evaluate(sch)
    except SingularInteraction:
        return
    n = g.shape[0]
    assert np.linalg.norm(g.conj().T @ g - np.eye(n)) <= 1e-10 * max(1, np.linalg.norm(g) ** 2)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_fold_order_independence(seed):
    sch = random_scheme(seed, n_systems=4)
    perm = list(rng(seed + 1).permutation(list(sch.names)))
    a = iterative_cascade(sch)
    b = iterative_cascade(sch, perm)
    assert _close(a, b, 1e-11)


def test_chain_zy_fully_reduced_is_exact():
    sch = random_chain(3, lengths=(1, 0, 1), sizes=(2, 2))
    plan = plan_reduction(sch)
    assert plan.fully_reduced
    ref, _ = evaluate(sch)
    # no delta-joins remain, so epsilon plays no role
    assert _close(s_from_z(evaluate_impedance(sch, plan)), ref, 1e-10)
    assert _close(s_from_y(evaluate_admittance(sch, plan)), ref, 1e-10)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_zy_paths_within_quasi_delta_floor(seed):
    sch = random_scheme(seed, n_systems=3)
    ref = brute_force(sch)
    for plan in (None, plan_reduction(sch)):
        for ev, back in ((evaluate_impedance, s_from_z), (evaluate_admittance, s_from_y)):
            assert _close(back(ev(sch, plan)), ref, 1e-6)


def test_zy_iterative_matches_s():
    mn = build_meta_network(2, seed=3)
    ref, _ = evaluate(mn.scheme)
    assert _close(s_from_z(iterative_cascade(mn.scheme, representation="Z")), ref, 1e-10)
    assert _close(s_from_y(iterative_cascade(mn.scheme, representation="Y")), ref, 1e-10)
