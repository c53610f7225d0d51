"""Recovery of power waves, potentials and fluxes at connected ports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import CascadeCache, _ports, _split
from .errors import PortSetMismatch, SingularInteraction
from .linalg import LUFactor, as_matrix
from .network import NetworkSystem, Representation


@dataclass(frozen=True)
class WaveMaps:
    """Linear maps from free-port excitation ``a_N`` to connected-port quantities.

    Attributes
    ----------
    psi : ndarray, shape (n(C), n(N))
        Potentials ``a + b`` at the connected ports.
    phi : ndarray, shape (n(C), n(N))
        Fluxes ``a - b``; positive means flow out of the subsystem owning
        the port.
    c_labels : list of (str, int)
    pairs : list of (int, int)
        Delta-paired rows ``(i, j)``; row ``i`` belongs to the system
        declared first in the join and carries the positive orientation.
    """

    psi: np.ndarray
    phi: np.ndarray
    c_labels: list
    pairs: list


def connected_waves(cache: CascadeCache, a_N):
    """Power waves at the connected ports for a free-port excitation.

    Parameters
    ----------
    cache : CascadeCache
    a_N : array_like, shape (n(N),) or (n(N), m)
        Incident waves on the free ports in ``cache.sup.n_labels`` order.

    Returns
    -------
    a_C, b_C : ndarray
        ``b_C = S̄ S_CN a_N`` is emitted by the connection system into the
        subsystems; ``a_C = S_con^{-1} b_C`` is what the subsystems send
        into the connection system.
    """
    a = np.asarray(a_N, dtype=complex)
    if a.shape[0] != cache.sup.n_n:
        raise PortSetMismatch(f"a_N has {a.shape[0]} entries, expected {cache.sup.n_n}")
    vec = a.ndim == 1
    a2 = a[:, None] if vec else a
    sa = _cn_times(cache, a2)
    b_c = cache.sbar @ sa
    a_c = cache.con.apply_inverse(b_c)
    return (a_c[:, 0], b_c[:, 0]) if vec else (a_c, b_c)


def _cn_times(cache: CascadeCache, x: np.ndarray) -> np.ndarray:
    out = np.zeros((cache.sup.n_c, x.shape[1]), dtype=complex)
    for m in cache.sup.members.values():
        if len(m.n_pos) and len(m.c_pos):
            out[m.c_pos] = m.cn @ x[m.n_pos]
    return out


def delta_pairs(cache: CascadeCache) -> list[tuple[int, int]]:
    """Row pairs ``(i, j)`` joined by delta-connections, first-declared side first."""
    con = cache.con
    nd = con.n_connected if con.is_pure_permutation else (con.n_delta or 0)
    if con.is_pure_permutation:
        perm = con.perm
    else:
        perm = np.argmax(np.abs(con.matrix[:nd, :nd]), axis=1) if nd else np.zeros(0, int)
    pairs = []
    for i in range(nd):
        j = int(perm[i])
        if i < j:
            pairs.append((i, j))
    return pairs


def wave_maps(cache: CascadeCache) -> WaveMaps:
    """``Ψ = (S_con^{-1} + I) S̄ S_CN`` and ``Φ = (S_con^{-1} - I) S̄ S_CN``.

    The maps are built on first request and stored on the cache; an updated
    cache is a new object and starts without them.
    """
    if cache._maps is not None:
        return cache._maps
    b = cache.sup.cn_right(cache.sbar)           # S̄ S_CN
    a = cache.con.apply_inverse(b)
    pairs = _oriented_pairs(cache)
    maps = WaveMaps(a + b, a - b, list(cache.sup.c_labels), pairs)
    cache._maps = maps
    return maps


def _oriented_pairs(cache: CascadeCache) -> list[tuple[int, int]]:
    order = {n: i for i, n in enumerate(cache.sup.members)}
    out = []
    for i, j in delta_pairs(cache):
        li, lj = cache.sup.c_labels[i], cache.sup.c_labels[j]
        out.append((i, j) if order.get(li[0], 0) <= order.get(lj[0], 0) else (j, i))
    return out


def internal_vj(representation, sys1: NetworkSystem, C, load, drive):
    """Voltages and currents at the connected ports of a loaded system.

    Parameters
    ----------
    representation : {"Z", "Y"}
    sys1 : NetworkSystem
        In the given representation.
    C : str or sequence of int
        Ports of ``sys1`` terminated by ``load``.
    load : array_like
        ``Z2`` (or ``Y2``) of the terminating system.
    drive : array_like
        ``J_N`` for the impedance form, ``V_N`` for the admittance form.

    Returns
    -------
    V_C, J_C : ndarray
        Port voltages and currents (into ``sys1``) at the connected ports.
    """
    rep = Representation.parse(representation)
    cp, np_ = _ports(sys1, C)
    load = as_matrix(load, name="load")
    _, _, cn, cc = _split(sys1.matrix, np_, cp)
    x = np.asarray(drive, dtype=complex)
    if load.shape != (len(cp), len(cp)) or x.shape[0] != len(np_):
        raise PortSetMismatch("load or drive does not conform to the port sets")
    if len(cp) == 0:
        z = np.zeros((0,) + x.shape[1:], dtype=complex)
        return z, z
    t = LUFactor(cc + load, error=SingularInteraction).solve(cn @ x)
    if rep == Representation.Z:
        j_c = -t
        v_c = load @ t
    elif rep == Representation.Y:
        v_c = -t
        j_c = load @ t
    else:
        raise ValueError("internal_vj expects the Z or Y representation")
    return v_c, j_c
