from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import contraction, random_scheme, rng, seeds
from multiport import SubsystemUpdate, evaluate, plan_reduction, update_subsystem
from multiport.errors import InvalidReduction, PortSetMismatch
from multiport.linalg import rel_error, rel_std_error
from multiport.metanet import build_meta_network
from multiport.update import replace_system, update_many


def _fresh(scheme, plan=None):
    return evaluate(scheme, plan, keep_cache=False)[0]


def test_noop_is_exact():
    mn = build_meta_network(3, seed=0)
    res, cache = evaluate(mn.scheme)
    out, new = update_subsystem(cache, SubsystemUpdate("C", mn.scheme.systems["C"].matrix))
    np.testing.assert_array_equal(new.sbar, cache.sbar)
    np.testing.assert_array_equal(out, res)
    assert new is not cache and new.n_updates == 1


def test_free_block_change_keeps_sbar():
    mn = build_meta_network(2, seed=1)
    _, cache = evaluate(mn.scheme)
    m = mn.scheme.systems["A"].matrix.copy()
    m[0, 0] += 0.1
    out, new = update_subsystem(cache, SubsystemUpdate("A", m))
    np.testing.assert_array_equal(new.sbar, cache.sbar)
    assert rel_error(out, _fresh(mn.scheme.with_system("A", mn.scheme.systems["A"].with_matrix(m)))) < 1e-14


def test_rank_one_update():
    mn = build_meta_network(1, seed=2)
    _, cache = evaluate(mn.scheme)
    assert cache.sup.members["C"].c_pos.size == 1
    new_sys, _ = mn.regenerate("C", 99)
    out, _ = update_subsystem(cache, SubsystemUpdate("C", new_sys.matrix))
    assert rel_error(out, _fresh(mn.scheme.with_system("C", new_sys))) < 1e-13


@pytest.mark.parametrize("name", ["A", "B", "C", "D"])
def test_meta_network_update(name):
    mn = build_meta_network(5, seed=3)
    _, cache = evaluate(mn.scheme)
    new_sys, _ = mn.regenerate(name, 7)
    out, new = update_subsystem(cache, SubsystemUpdate(name, new_sys.matrix))
    ref = _fresh(mn.scheme.with_system(name, new_sys))
    assert rel_std_error(out, ref) <= 1e-13
    assert new.residual() < 1e-12


def test_update_involution():
    mn = build_meta_network(3, seed=4)
    res, cache = evaluate(mn.scheme)
    new_sys, _ = mn.regenerate("D", 5)
    _, c1 = replace_system(cache, "D", new_sys)
    back, _ = replace_system(c1, "D", mn.scheme.systems["D"])
    assert rel_error(back, res) < 1e-13


def test_sequential_updates():
    mn = build_meta_network(2, seed=5)
    _, cache = evaluate(mn.scheme)
    scheme = mn.scheme
    k = 12
    ups = []
    for i in range(k):
        s, _ = mn.regenerate("D", [5, i])
        ups.append(SubsystemUpdate("D", s.matrix))
        scheme = scheme.with_system("D", s)
    out, new = update_many(cache, ups)
    assert new.n_updates == k
    assert rel_error(out, _fresh(scheme)) <= 1e-12 * np.sqrt(k)


def test_drift_guard_rebuilds(monkeypatch):
    import multiport.update as upd_mod
    monkeypatch.setattr(upd_mod, "DRIFT_CHECK_INTERVAL", 1)
    monkeypatch.setattr(upd_mod, "DRIFT_TOLERANCE", -1.0)
    mn = build_meta_network(1, seed=6)
    _, cache = evaluate(mn.scheme)
    s, _ = mn.regenerate("A", 1)
    _, new = update_subsystem(cache, SubsystemUpdate("A", s.matrix))
    assert new.n_updates == 0


def test_update_on_reduced_cache():
    mn = build_meta_network(3, seed=7, modified=True)
    plan = plan_reduction(mn.scheme)
    _, cache = evaluate(mn.scheme, plan)
    s, _ = mn.regenerate("A", 3)
    out, _ = update_subsystem(cache, SubsystemUpdate("A", s.matrix))
    assert rel_error(out, _fresh(mn.scheme.with_system("A", s))) < 1e-13
    with pytest.raises(InvalidReduction):
        update_subsystem(cache, SubsystemUpdate("D", mn.scheme.systems["D"].matrix))


def test_update_shape_mismatch():
    mn = build_meta_network(1, seed=8)
    _, cache = evaluate(mn.scheme)
    with pytest.raises(PortSetMismatch):
        update_subsystem(cache, SubsystemUpdate("A", np.eye(2)))
    with pytest.raises(InvalidReduction):
        update_subsystem(cache, SubsystemUpdate("Q", np.eye(2)))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 4))
def test_update_property(seed, n_updates):
    sch = random_scheme(seed)
    _, cache = evaluate(sch)
    r = rng(seed)
    names = list(sch.names)
    for _ in range(n_updates):
        name = names[int(r.integers(len(names)))]
        m = contraction(r, sch.systems[name].n_ports)
        sch = sch.with_system(name, sch.systems[name].with_matrix(m))
        out, cache = update_subsystem(cache, SubsystemUpdate(name, m))
    assert rel_error(out, _fresh(sch)) <= 1e-11
