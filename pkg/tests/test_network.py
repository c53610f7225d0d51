from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import cmat, contraction, rng, seeds, unitary
from multiport import (
    NetworkSystem,
    PortPartition,
    Representation,
    partition_blocks,
    s_from_y,
    s_from_z,
    waves_to_potential_flux,
    y_from_s,
    y_from_z,
    z_from_s,
    z_from_y,
)
from multiport.errors import DeltaLikeSingularity, PortSetMismatch, UnknownPortSet
from multiport.network import DEFAULT_Z0, convert


def test_partition_defaults():
    p = PortPartition(5, {"N": [0, 4], "A": [1, 2], "B": [3]})
    assert p["P"] == (0, 1, 2, 3, 4)
    assert p["C"] == (1, 2, 3)
    assert p["A"] == (1, 2)
    assert PortPartition(2, {"A": [0, 1]})["N"] == ()
    with pytest.raises(UnknownPortSet):
        p["Q"]


def test_partition_keeps_declared_order():
    p = PortPartition(3, {"N": [2, 0], "C": [1]})
    np.testing.assert_array_equal(p.indices("N"), [2, 0])


@pytest.mark.parametrize("sets", [
    {"N": [0, 1], "C": [1, 2]},     # overlap
    {"N": [0]},                     # incomplete
    {"N": [0, 1, 5]},               # out of range
    {"P": [0, 1, 2]},               # reserved
])
def test_partition_invalid(sets):
    with pytest.raises(PortSetMismatch):
        PortPartition(3, sets)


def test_simple_and_eq():
    p = PortPartition.simple([2, 0], 4)
    assert p["N"] == (0, 2) and p["C"] == (1, 3)
    assert p == PortPartition(4, {"N": [0, 2], "C": [1, 3]})


def test_network_system_blocks_and_immutability():
    m = np.arange(16).reshape(4, 4).astype(complex)
    s = NetworkSystem(m, {"N": [3], "C": [0, 1, 2]})
    np.testing.assert_array_equal(s.block("N", "C"), [[12, 13, 14]])
    np.testing.assert_array_equal(partition_blocks(s, "C", "N"), [[3], [7], [11]])
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 1
    m[0, 0] = 99
    assert s.matrix[0, 0] == 0
    with pytest.raises(PortSetMismatch):
        NetworkSystem(np.eye(3), PortPartition(2, {"N": [0, 1]}))


def test_representation_parse():
    assert Representation.parse("z") is Representation.Z
    with pytest.raises(ValueError):
        Representation.parse("H")


def test_matched_load_and_open_short():
    assert s_from_z([[DEFAULT_Z0]])[0, 0] == pytest.approx(0)
    assert s_from_y([[0.0]])[0, 0] == pytest.approx(1)       # open circuit
    assert s_from_z([[0.0]])[0, 0] == pytest.approx(-1)      # short circuit


def test_delta_has_no_impedance():
    delta = np.array([[0, 1], [1, 0]], complex)
    with pytest.raises(DeltaLikeSingularity):
        z_from_s(delta)
    with pytest.raises(DeltaLikeSingularity):
        y_from_s(-delta)


def test_z_y_inverse():
    r = rng(0)
    Z = cmat(r, 4) + 5 * np.eye(4)
    np.testing.assert_allclose(y_from_z(Z) @ Z, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(z_from_y(y_from_z(Z)), Z, rtol=1e-12)


def _assert_close(a, b, tol):
    assert np.linalg.norm(a - b) <= tol * max(1.0, np.linalg.norm(b))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 8), st.sampled_from(["uniform", "real", "complex"]))
def test_roundtrips(seed, n, kind):
    r = rng(seed)
    S = contraction(r, n, 0.8)
    if kind == "uniform":
        ref = None
    elif kind == "real":
        ref = 10 + 90 * r.random(n)
    else:
        ref = (10 + 90 * r.random(n)) + 1j * (20 * r.random(n) - 10)
    Z = z_from_s(S, ref)
    Y = y_from_s(S, ref)
    _assert_close(s_from_z(Z, ref), S, 1e-10)
    _assert_close(s_from_y(Y, ref), S, 1e-10)
    _assert_close(Y @ Z, np.eye(n), 1e-9)
    for src, dst in [("S", "Z"), ("Z", "Y"), ("Y", "S")]:
        m = {"S": S, "Z": Z, "Y": Y}[src]
        back = convert(convert(m, src, dst, ref), dst, src, ref)
        _assert_close(back, m, 1e-9)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 6))
def test_lossless_reciprocal_maps_to_imaginary_symmetric_z(seed, n):
    # a symmetric unitary S with a real reference is a reactive reciprocal Z
    u = unitary(rng(seed), n)
    S = u @ u.T
    try:
        Z = z_from_s(S)
    except DeltaLikeSingularity:
        return
    scale = np.linalg.norm(Z)
    assert np.linalg.norm(Z - Z.T) <= 1e-9 * scale
    assert np.linalg.norm(Z.real) <= 1e-8 * scale


def test_system_to_roundtrip():
    r = rng(4)
    s = NetworkSystem(contraction(r, 3), {"N": [0], "C": [1, 2]}, reference=[25, 50, 75])
    z = s.to("Z")
    assert z.representation is Representation.Z
    assert z.partition == s.partition
    np.testing.assert_allclose(z.to("S").matrix, s.matrix, atol=1e-12)
    assert s.to("S") is s


def test_potential_flux():
    psi, phi = waves_to_potential_flux([1, 2], [3, 5])
    np.testing.assert_array_equal(psi, [4, 7])
    np.testing.assert_array_equal(phi, [-2, -3])
    with pytest.raises(PortSetMismatch):
        waves_to_potential_flux([1], [1, 2])
    with pytest.raises(PortSetMismatch):
        waves_to_potential_flux([1, 2], [1, 2], [0, 1], [1, 0])
