"""Closed-form connection evaluators.

Cascade loading, the generic supersystem connection and the Redheffer star
product, in scattering form and in impedance/admittance form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .connection import ConnectionSystem, Label
from .errors import InvalidBlock, PortOrderMismatch, PortSetMismatch, SingularInteraction
from .linalg import LUFactor, as_matrix
from .network import NetworkSystem, Representation

SYMMETRY_RTOL = 1e-14


def _ports(sys: NetworkSystem, c) -> tuple[np.ndarray, np.ndarray]:
    """Connected ports (label or explicit list) and the remaining ports, ascending."""
    if isinstance(c, str):
        cp = sys.partition.indices(c)
    else:
        cp = np.asarray(list(c), dtype=int)
    mask = np.ones(sys.n_ports, dtype=bool)
    mask[cp] = False
    return cp, np.flatnonzero(mask)


def _split(m: np.ndarray, n: np.ndarray, c: np.ndarray):
    return m[np.ix_(n, n)], m[np.ix_(n, c)], m[np.ix_(c, n)], m[np.ix_(c, c)]


def _is_symmetric(a: np.ndarray) -> bool:
    if a.size == 0:
        return True
    return np.linalg.norm(a - a.T) <= SYMMETRY_RTOL * np.linalg.norm(a)


# --------------------------------------------------------------------------
# cascade loading

def cascade_load_s(S1: NetworkSystem, C, S2) -> np.ndarray:
    """Terminate the ``C`` ports of ``S1`` with the scattering matrix ``S2``.

    Evaluated as ``S_NN + S_NC S2 (I - S_CC S2)^{-1} S_CN``, which equals
    ``S_NN + S_NC (S2^{-1} - S_CC)^{-1} S_CN`` but also holds for singular
    ``S2``.

    Parameters
    ----------
    S1 : NetworkSystem
        Scattering representation.
    C : str or sequence of int
        Connected ports of ``S1``; the i-th one meets port i of ``S2``.
    S2 : array_like, shape (n(C), n(C))

    Returns
    -------
    ndarray
        Scattering matrix over the remaining ports of ``S1`` in ascending order.

    Raises
    ------
    SingularInteraction
        If ``I - S_CC S2`` is singular.
    """
    cp, np_ = _ports(S1, C)
    S2 = as_matrix(S2, name="S2")
    if S2.shape != (len(cp), len(cp)):
        raise PortSetMismatch(f"load has shape {S2.shape}, expected {(len(cp),) * 2}")
    nn, nc, cn, cc = _split(S1.matrix, np_, cp)
    if len(cp) == 0:
        return nn.copy()
    lu = LUFactor(np.eye(len(cp)) - cc @ S2, error=SingularInteraction)
    return nn + nc @ (S2 @ lu.solve(cn))


def cascade_load_z(Z1: NetworkSystem, C, Z2) -> np.ndarray:
    """Impedance cascade loading ``Z_NN - Z_NC (Z_CC + Z2)^{-1} Z_CN``."""
    cp, np_ = _ports(Z1, C)
    Z2 = as_matrix(Z2, name="Z2")
    if Z2.shape != (len(cp), len(cp)):
        raise PortSetMismatch(f"load has shape {Z2.shape}, expected {(len(cp),) * 2}")
    nn, nc, cn, cc = _split(Z1.matrix, np_, cp)
    if len(cp) == 0:
        return nn.copy()
    return nn - nc @ LUFactor(cc + Z2, error=SingularInteraction).solve(cn)


def cascade_load_y(Y1: NetworkSystem, C, Y2) -> np.ndarray:
    """Admittance cascade loading ``Y_NN - Y_NC (Y_CC + Y2)^{-1} Y_CN``."""
    return cascade_load_z(Y1, C, Y2)


# --------------------------------------------------------------------------
# Redheffer star product

def star_blocks(unn, unc, ucn, ucc, vnn, vnc, vcn, vcc) -> np.ndarray:
    """Star product from explicit blocks; output ports are ``N_U`` then ``N_V``."""
    k = ucc.shape[0]
    if vcc.shape != (k, k):
        raise PortSetMismatch(f"connected sets differ in size: {k} vs {vcc.shape[0]}")
    nu, nv = unn.shape[0], vnn.shape[0]
    out = np.zeros((nu + nv, nu + nv), dtype=complex)
    out[:nu, :nu] = unn
    out[nu:, nu:] = vnn
    if k == 0:
        return out
    lu_uv = LUFactor(ucc @ vcc - np.eye(k), error=SingularInteraction)
    y1 = lu_uv.solve(ucn)                       # X^{UV} S^U_CN
    if _is_symmetric(ucc) and _is_symmetric(vcc):
        y2 = lu_uv.solve(vcn, transpose=True)   # X^{VU} = (X^{UV})^T
    else:
        y2 = LUFactor(vcc @ ucc - np.eye(k), error=SingularInteraction).solve(vcn)
    out[:nu, :nu] -= unc @ (vcc @ y1)
    out[nu:, :nu] = -vnc @ y1
    out[:nu, nu:] = -unc @ y2
    out[nu:, nu:] -= vnc @ (ucc @ y2)
    return out


def redheffer_star(U: NetworkSystem, V: NetworkSystem, CU, CV) -> np.ndarray:
    """Connect ports ``CU`` of ``U`` to ports ``CV`` of ``V`` (scattering form).

    Returns
    -------
    ndarray
        Scattering matrix over the free ports of ``U`` followed by those of
        ``V``, each in ascending port order.

    Raises
    ------
    SingularInteraction
        If ``S^U_CC S^V_CC - I`` is singular.
    """
    cu, nu = _ports(U, CU)
    cv, nv = _ports(V, CV)
    if len(cu) != len(cv):
        raise PortSetMismatch(f"connected sets differ in size: {len(cu)} vs {len(cv)}")
    return star_blocks(*_split(U.matrix, nu, cu), *_split(V.matrix, nv, cv))


def star_zy_blocks(unn, unc, ucn, ucc, vnn, vnc, vcn, vcc, sign: float) -> np.ndarray:
    """Impedance (``sign=+1``) or admittance (``sign=-1``) star from blocks."""
    k = ucc.shape[0]
    if vcc.shape != (k, k):
        raise PortSetMismatch(f"connected sets differ in size: {k} vs {vcc.shape[0]}")
    a, b = unn.shape[0], vnn.shape[0]
    out = np.zeros((a + b, a + b), dtype=complex)
    out[:a, :a] = unn
    out[a:, a:] = vnn
    if k == 0:
        return out
    lu = LUFactor(ucc + vcc, error=SingularInteraction)
    xu = lu.solve(ucn)
    xv = lu.solve(vcn)
    out[:a, :a] -= unc @ xu
    out[a:, a:] -= vnc @ xv
    out[:a, a:] = sign * (unc @ xv)
    out[a:, :a] = sign * (vnc @ xu)
    return out


def _star_zy(U, V, CU, CV, sign: float) -> np.ndarray:
    cu, nu = _ports(U, CU)
    cv, nv = _ports(V, CV)
    if len(cu) != len(cv):
        raise PortSetMismatch(f"connected sets differ in size: {len(cu)} vs {len(cv)}")
    return star_zy_blocks(*_split(U.matrix, nu, cu), *_split(V.matrix, nv, cv), sign)


def redheffer_star_z(U: NetworkSystem, V: NetworkSystem, CU, CV) -> np.ndarray:
    """Impedance analogue of the star product.

    ``Z_NN - Z_NC [[X, -X], [-X, X]] Z_CN`` with ``X = (Z^U_CC + Z^V_CC)^{-1}``.
    """
    return _star_zy(U, V, CU, CV, +1.0)


def redheffer_star_y(U: NetworkSystem, V: NetworkSystem, CU, CV) -> np.ndarray:
    """Admittance analogue of the star product.

    ``Y_NN - Y_NC [[X, X], [X, X]] Y_CN`` with ``X = (Y^U_CC + Y^V_CC)^{-1}``.
    """
    return _star_zy(U, V, CU, CV, -1.0)


# --------------------------------------------------------------------------
# supersystem

@dataclass
class _Member:
    name: str
    system: NetworkSystem
    c_ports: np.ndarray
    c_pos: np.ndarray
    n_ports: np.ndarray
    n_pos: np.ndarray
    nn: np.ndarray = field(init=False)
    nc: np.ndarray = field(init=False)
    cn: np.ndarray = field(init=False)
    cc: np.ndarray = field(init=False)

    def __post_init__(self):
        self.nn, self.nc, self.cn, self.cc = _split(self.system.matrix, self.n_ports, self.c_ports)


class Supersystem:
    """Block-diagonal aggregate of subsystems with explicit port orders.

    The matrix is never formed densely as a whole; products with its
    off-diagonal blocks are done member by member.

    Parameters
    ----------
    systems : mapping of str to NetworkSystem
        Members, all in the same representation.
    c_labels : sequence of (name, port)
        Order of the connected ports C.
    n_labels : sequence of (name, port)
        Order of the free ports N.
    """

    def __init__(self, systems: Mapping[str, NetworkSystem], c_labels: Sequence[Label],
                 n_labels: Sequence[Label]):
        self.c_labels = [tuple(l) for l in c_labels]
        self.n_labels = [tuple(l) for l in n_labels]
        reps = {s.representation for s in systems.values()}
        if len(reps) > 1:
            raise InvalidBlock("supersystem members must share one representation")
        self.representation = reps.pop() if reps else Representation.S
        self.members: dict[str, _Member] = {}
        by_name: dict[str, tuple[list, list, list, list]] = {n: ([], [], [], []) for n in systems}
        for pos, (name, port) in enumerate(self.c_labels):
            by_name[name][0].append(port)
            by_name[name][1].append(pos)
        for pos, (name, port) in enumerate(self.n_labels):
            by_name[name][2].append(port)
            by_name[name][3].append(pos)
        for name, sys in systems.items():
            cp, cpos, np_, npos = (np.asarray(v, dtype=int) for v in by_name[name])
            if len(cp) + len(np_) != sys.n_ports or len(set(cp) | set(np_)) != sys.n_ports:
                raise PortSetMismatch(f"ports of {name!r} not covered exactly once by N and C")
            self.members[name] = _Member(name, sys, cp, cpos, np_, npos)
        self._dense: dict[str, np.ndarray] = {}

    @classmethod
    def from_scheme(cls, scheme, names: Sequence[str], c_labels, representation="S"):
        systems = {n: scheme.systems[n].to(representation) for n in scheme.names if n in set(names)}
        return cls(systems, c_labels, scheme.free_labels(systems))

    @property
    def n_c(self) -> int:
        return len(self.c_labels)

    @property
    def n_n(self) -> int:
        return len(self.n_labels)

    def _assemble(self, key: str) -> np.ndarray:
        if key not in self._dense:
            rows = self.n_n if key[0] == "n" else self.n_c
            cols = self.n_n if key[1] == "n" else self.n_c
            out = np.zeros((rows, cols), dtype=complex)
            for m in self.members.values():
                r = m.n_pos if key[0] == "n" else m.c_pos
                c = m.n_pos if key[1] == "n" else m.c_pos
                out[np.ix_(r, c)] = getattr(m, key)
            self._dense[key] = out
        return self._dense[key]

    @property
    def nn(self) -> np.ndarray:
        return self._assemble("nn")

    @property
    def nc(self) -> np.ndarray:
        return self._assemble("nc")

    @property
    def cn(self) -> np.ndarray:
        return self._assemble("cn")

    @property
    def cc(self) -> np.ndarray:
        return self._assemble("cc")

    def nc_left(self, X) -> np.ndarray:
        """``S_NC @ X`` using the block structure."""
        out = np.zeros((self.n_n, X.shape[1]), dtype=complex)
        for m in self.members.values():
            if len(m.n_pos) and len(m.c_pos):
                out[m.n_pos] = m.nc @ X[m.c_pos]
        return out

    def cn_right(self, X) -> np.ndarray:
        """``X @ S_CN`` using the block structure."""
        out = np.zeros((X.shape[0], self.n_n), dtype=complex)
        for m in self.members.values():
            if len(m.n_pos) and len(m.c_pos):
                out[:, m.n_pos] = X[:, m.c_pos] @ m.cn
        return out

    def replace(self, name: str, system: NetworkSystem) -> "Supersystem":
        """Copy with one member's matrix replaced (same ports and orders)."""
        old = self.members[name].system
        if system.n_ports != old.n_ports:
            raise PortSetMismatch(f"replacement for {name!r} has {system.n_ports} ports, "
                                  f"expected {old.n_ports}")
        new = object.__new__(Supersystem)
        new.c_labels = self.c_labels
        new.n_labels = self.n_labels
        new.representation = self.representation
        new.members = dict(self.members)
        m = self.members[name]
        new.members[name] = _Member(name, system.to(self.representation),
                                    m.c_ports, m.c_pos, m.n_ports, m.n_pos)
        new._dense = {}
        return new


@dataclass
class CascadeCache:
    """Interaction inverse and bookkeeping retained after a connection.

    Attributes
    ----------
    sbar : ndarray
        ``(S_con^{-1} - S_CC)^{-1}`` over the connected ports.
    sup : Supersystem
    con : ConnectionSystem
    result : ndarray
        The connected network's scattering matrix over ``sup.n_labels``.
    n_updates : int
        Number of chained updates since the last full evaluation.
    """

    sbar: np.ndarray
    sup: Supersystem
    con: ConnectionSystem
    result: np.ndarray
    n_updates: int = 0
    _maps: object = field(default=None, repr=False)

    @property
    def c_index(self) -> dict[Label, int]:
        return {l: i for i, l in enumerate(self.sup.c_labels)}

    def residual(self) -> float:
        """``||(I - S_con S_CC) S̄ - S_con||_F / ||S_con||_F``."""
        n = self.sup.n_c
        if n == 0:
            return 0.0
        scon = self.con.blocks()[0] if not self.con.is_pure_permutation else self.con.matrix
        r = self.sbar - self.con.apply(self.sup.cc @ self.sbar) - scon
        return float(np.linalg.norm(r) / np.linalg.norm(scon))


def connect_supersystem(sup: Supersystem, con: ConnectionSystem, keep_cache: bool = True):
    """Connect all ports ``C`` of a supersystem through ``con``.

    Computes ``S_NN + S_NC S̄ S_CN`` with ``S̄ = (S_con^{-1} - S_CC)^{-1}``.
    A pure permutation is applied as an index map; otherwise the form
    ``S̄ = S_con (I - S_CC S_con)^{-1}`` is used, so ``S_con`` is never
    inverted.

    Parameters
    ----------
    sup : Supersystem
    con : ConnectionSystem
        Without free ports; its labels must equal ``sup.c_labels``.
    keep_cache : bool
        If false only ``S̄ S_CN`` is solved for (cheaper) and no cache is
        returned.

    Returns
    -------
    result : ndarray
        Scattering matrix over ``sup.n_labels``.
    cache : CascadeCache or None

    Raises
    ------
    PortOrderMismatch
        If the connection's port order differs from the supersystem's C.
    SingularInteraction
    """
    if con.n_free:
        raise PortOrderMismatch("connection system has free ports; use the star product")
    if list(con.labels) != list(sup.c_labels):
        raise PortOrderMismatch("connection port order does not match the supersystem's C")
    n = sup.n_c
    if n == 0:
        res = sup.nn.copy()
        cache = CascadeCache(np.zeros((0, 0), complex), sup, con, res) if keep_cache else None
        return res, cache
    if con.is_pure_permutation:
        a = -sup.cc
        a[np.arange(n), con.perm] += 1.0
        lu = LUFactor(a, error=SingularInteraction)
        if not keep_cache:
            return sup.nn + sup.nc_left(lu.solve(sup.cn)), None
        sbar = lu.solve(np.eye(n, dtype=complex))
    else:
        scon = con.blocks()[0]
        lu = LUFactor(np.eye(n) - con.apply_right(sup.cc), error=SingularInteraction)
        if not keep_cache:
            return sup.nn + sup.nc_left(con.apply(lu.solve(sup.cn))), None
        # S_con (I - S_CC S_con)^{-1} = ((I - S_CC S_con)^{-T} S_con^T)^T
        sbar = lu.solve(scon.T, transpose=True).T
    res = sup.nn + sup.nc_left(sup.cn_right(sbar))
    return res, CascadeCache(sbar, sup, con, res)
