"""Connection schemes and connection systems.

A :class:`ConnectionScheme` declares which port sets of which subsystems are
joined.  From it we build a :class:`ConnectionSystem`: either a pure
delta-connection (a symmetric permutation, stored as an index map) or a
block-diagonal mix of delta blocks and embedded subsystems.

Port order of a connection system
---------------------------------
``labels[p]`` names the subsystem port ``(system, port)`` that connection
port ``p`` faces.  The supersystem's connected ports are ordered by these
labels, so the connection matrix applies without any further permutation.

* Global connection: systems in declared order; within a system, its joined
  sets in join order; within a set, the stored order.
* Embedded connection: remaining delta-joins first (side A set, then side B
  set, joins in declared order), then each embedded system in declared order
  with its joined sets in join order.  Ports of an embedded system that are
  not joined are free ports of the connection system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidEpsilon,
    InvalidReduction,
    InvalidScheme,
    PortSetMismatch,
    UnknownPortSet,
)
from .linalg import block_diag, solve_linear
from .network import NetworkSystem, Representation, y_from_s, z_from_s

DEFAULT_EPSILON = 1e-8

Label = tuple[str, int]


@dataclass(frozen=True)
class Join:
    sys_a: str
    set_a: str
    sys_b: str
    set_b: str

    def other(self, name: str) -> str:
        return self.sys_b if name == self.sys_a else self.sys_a

    def touches(self, name: str) -> bool:
        return name in (self.sys_a, self.sys_b)

    def side(self, name: str) -> str:
        """Port-set label used by ``name`` in this join."""
        return self.set_a if name == self.sys_a else self.set_b


class ConnectionScheme:
    """Declaration of the subsystems and how their port sets are joined.

    Parameters
    ----------
    systems : mapping of str to NetworkSystem
        Subsystems in declared order.
    joins : iterable of (sys_a, set_a, sys_b, set_b)
        Delta-joins. The i-th port of ``set_a`` is paired with the i-th port
        of ``set_b``.
    embedded : iterable of str, optional
        Subsystems to treat as part of the connection system.  Used as a
        manual override by the reduction planner.
    """

    def __init__(self, systems: Mapping[str, NetworkSystem], joins: Iterable = (),
                 embedded: Iterable[str] = ()):
        self.systems: dict[str, NetworkSystem] = dict(systems)
        self.joins: tuple[Join, ...] = tuple(
            j if isinstance(j, Join) else Join(*j) for j in joins)
        self.embedded: tuple[str, ...] = tuple(embedded)
        self._validate()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.systems)

    def _validate(self):
        used: dict[Label, Join] = {}
        for j in self.joins:
            if j.sys_a == j.sys_b:
                raise InvalidScheme(f"system {j.sys_a!r} joined to itself")
            for name, label in ((j.sys_a, j.set_a), (j.sys_b, j.set_b)):
                if name not in self.systems:
                    raise InvalidScheme(f"unknown system {name!r} in join")
                if label in ("N", "P") or label not in self.systems[name].partition:
                    raise UnknownPortSet(f"{name}.{label}")
            pa = self.systems[j.sys_a].partition[j.set_a]
            pb = self.systems[j.sys_b].partition[j.set_b]
            if len(pa) != len(pb):
                raise PortSetMismatch(
                    f"{j.sys_a}.{j.set_a} has {len(pa)} ports, "
                    f"{j.sys_b}.{j.set_b} has {len(pb)}")
            for name, ports in ((j.sys_a, pa), (j.sys_b, pb)):
                for p in ports:
                    if (name, p) in used:
                        raise InvalidScheme(f"port {p} of {name!r} joined twice")
                    used[(name, p)] = j
        for name in self.embedded:
            if name not in self.systems:
                raise InvalidScheme(f"unknown embedded system {name!r}")
        check_non_adjacent(self, self.embedded)

    def joins_of(self, name: str) -> list[Join]:
        return [j for j in self.joins if j.touches(name)]

    def neighbours(self, name: str) -> set[str]:
        return {j.other(name) for j in self.joins_of(name)}

    def connected_ports(self, name: str) -> list[int]:
        """Joined ports of ``name``: its sets in join order, each in stored order."""
        part = self.systems[name].partition
        out: list[int] = []
        for j in self.joins_of(name):
            out.extend(part[j.side(name)])
        return out

    def free_ports(self, name: str) -> list[int]:
        """Ports of ``name`` not used by any join, ascending."""
        joined = set(self.connected_ports(name))
        return [p for p in range(self.systems[name].n_ports) if p not in joined]

    def free_labels(self, names: Iterable[str] | None = None) -> list[Label]:
        """Canonical free-port order: systems in declared order, ports ascending."""
        names = self.names if names is None else [n for n in self.names if n in set(names)]
        return [(n, p) for n in names for p in self.free_ports(n)]

    def pairs(self, j: Join) -> list[tuple[Label, Label]]:
        pa = self.systems[j.sys_a].partition[j.set_a]
        pb = self.systems[j.sys_b].partition[j.set_b]
        return [((j.sys_a, a), (j.sys_b, b)) for a, b in zip(pa, pb)]

    def partner_map(self) -> dict[Label, Label]:
        out: dict[Label, Label] = {}
        for j in self.joins:
            for la, lb in self.pairs(j):
                out[la] = lb
                out[lb] = la
        return out

    def with_system(self, name: str, system: NetworkSystem) -> "ConnectionScheme":
        old = self.systems[name]
        if system.n_ports != old.n_ports or system.partition != old.partition:
            raise PortSetMismatch(f"replacement for {name!r} changes its ports")
        systems = dict(self.systems)
        systems[name] = system
        return ConnectionScheme(systems, self.joins, self.embedded)


def check_non_adjacent(scheme: ConnectionScheme, names: Sequence[str]):
    chosen = set(names)
    for j in scheme.joins:
        if j.sys_a in chosen and j.sys_b in chosen:
            raise InvalidReduction(
                f"embedded systems {j.sys_a!r} and {j.sys_b!r} are directly joined")


class ConnectionSystem:
    """Connection system with an explicit port order.

    Attributes
    ----------
    labels : list of (str, int)
        Subsystem port faced by each connected port of the connection system.
    perm : ndarray of int or None
        For pure delta-connections, ``perm[p]`` is the partner position of
        ``p``; the matrix is then never needed explicitly.
    free_labels : list of (str, int)
        Free ports (of embedded systems), ordered after the connected ports.
    representation : Representation
    """

    def __init__(self, labels: Sequence[Label], *, perm=None, matrix=None,
                 free_labels: Sequence[Label] = (),
                 representation=Representation.S, reference=None,
                 n_delta: int | None = None, delta_perm=None, segments=None):
        self.labels = [tuple(l) for l in labels]
        self.free_labels = [tuple(l) for l in free_labels]
        self.representation = Representation.parse(representation)
        self.reference = reference
        self.perm = None if perm is None else np.asarray(perm, dtype=int)
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=complex)
        if self.perm is None and self._matrix is None:
            raise ValueError("either perm or matrix is required")
        n = len(self.labels) + len(self.free_labels)
        if self._matrix is not None and self._matrix.shape != (n, n):
            raise PortSetMismatch(
                f"connection matrix shape {self._matrix.shape} does not match {n} ports")
        # number of leading ports belonging to delta blocks
        self.n_delta = len(self.labels) if n_delta is None and self.perm is not None else n_delta
        # structure of a mixed system: permutation over the leading delta
        # ports and diagonal blocks (start, stop) for the embedded systems
        self.delta_perm = None if delta_perm is None else np.asarray(delta_perm, dtype=int)
        self.segments = None if segments is None else [tuple(t) for t in segments]

    @property
    def is_pure_permutation(self) -> bool:
        return self.perm is not None

    @property
    def n_connected(self) -> int:
        return len(self.labels)

    @property
    def n_free(self) -> int:
        return len(self.free_labels)

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            n = len(self.perm)
            m = np.zeros((n, n), dtype=complex)
            m[np.arange(n), self.perm] = 1.0
            self._matrix = m
        return self._matrix

    def blocks(self):
        """``(cc, cn, nc, nn)`` blocks with respect to connected/free ports."""
        m = self.matrix
        c = self.n_connected
        return m[:c, :c], m[:c, c:], m[c:, :c], m[c:, c:]

    @property
    def is_structured(self) -> bool:
        return self.perm is not None or (self.delta_perm is not None and self.segments is not None)

    def apply(self, X) -> np.ndarray:
        """``S_con @ X`` over the connected ports, exploiting the block structure."""
        X = np.asarray(X)
        if self.perm is not None:
            return X[self.perm]
        if not self.is_structured:
            return self.blocks()[0] @ X
        out = np.empty(X.shape, dtype=complex)
        nd = self.n_delta
        out[:nd] = X[self.delta_perm]
        for a, b in self.segments:
            out[a:b] = self._matrix[a:b, a:b] @ X[a:b]
        return out

    def apply_right(self, X) -> np.ndarray:
        """``X @ S_con`` over the connected ports, exploiting the block structure."""
        X = np.asarray(X)
        if self.perm is not None:
            return X[:, self.perm]
        if not self.is_structured:
            return X @ self.blocks()[0]
        out = np.empty(X.shape, dtype=complex)
        nd = self.n_delta
        out[:, :nd] = X[:, self.delta_perm]
        for a, b in self.segments:
            out[:, a:b] = X[:, a:b] @ self._matrix[a:b, a:b]
        return out

    def apply_inverse(self, X) -> np.ndarray:
        """``S_con^{-1} @ X``; a permutation is its own inverse."""
        if self.perm is not None:
            return np.asarray(X)[self.perm]
        return solve_linear(self.blocks()[0], X)

    def __repr__(self) -> str:
        kind = "delta" if self.is_pure_permutation else "embedded"
        return (f"ConnectionSystem({kind}, n_connected={self.n_connected}, "
                f"n_free={self.n_free})")


def _pair_positions(pairs) -> tuple[list[int], list[int]]:
    left: list[int] = []
    right: list[int] = []
    for a, b in pairs:
        a = [a] if np.isscalar(a) else list(a)
        b = [b] if np.isscalar(b) else list(b)
        if len(a) != len(b):
            raise PortSetMismatch(f"paired sets have {len(a)} and {len(b)} ports")
        left.extend(int(i) for i in a)
        right.extend(int(i) for i in b)
    return left, right


def delta_system(pairs, n: int | None = None, labels: Sequence[Label] | None = None
                 ) -> ConnectionSystem:
    """Pure delta-connection joining positions pairwise.

    Parameters
    ----------
    pairs : iterable of (idx_a, idx_b)
        Each element pairs two positions, or two equally long sequences of
        positions (the i-th entries are joined).
    n : int, optional
        Total number of ports; defaults to the number of paired positions.
    labels : sequence of labels, optional
        Defaults to ``("", p)`` for every position.

    Examples
    --------
    >>> delta_system([(0, 1)]).matrix.real
    array([[0., 1.],
           [1., 0.]])
    """
    left, right = _pair_positions(pairs)
    n = len(left) + len(right) if n is None else int(n)
    perm = -np.ones(n, dtype=int)
    for a, b in zip(left, right):
        if not (0 <= a < n and 0 <= b < n) or a == b or perm[a] >= 0 or perm[b] >= 0:
            raise PortSetMismatch(f"invalid pairing of positions {a} and {b}")
        perm[a] = b
        perm[b] = a
    if np.any(perm < 0):
        raise PortSetMismatch("every port of a delta-connection must be paired")
    if labels is None:
        labels = [("", p) for p in range(n)]
    return ConnectionSystem(labels, perm=perm)


def global_connection(scheme: ConnectionScheme) -> ConnectionSystem:
    """Delta-connection for the global method, ordered as the supersystem's C."""
    labels = [(name, p) for name in scheme.names for p in scheme.connected_ports(name)]
    pos = {l: i for i, l in enumerate(labels)}
    pairs = [(pos[la], pos[lb]) for j in scheme.joins for la, lb in scheme.pairs(j)]
    return delta_system(pairs, len(labels), labels)


def embed_connection(scheme: ConnectionScheme, embedded: Sequence[str]) -> ConnectionSystem:
    """Connection system holding the remaining delta-joins and embedded systems.

    With no embedded systems this equals :func:`global_connection` up to port
    ordering (delta blocks are listed join by join).

    Raises
    ------
    InvalidReduction
        If two embedded systems are directly joined.
    """
    embedded = [n for n in scheme.names if n in set(embedded)]
    check_non_adjacent(scheme, embedded)
    emb = set(embedded)
    partner = scheme.partner_map()
    labels: list[Label] = []
    blocks = []
    for j in scheme.joins:
        if j.sys_a in emb or j.sys_b in emb:
            continue
        pairs = scheme.pairs(j)
        labels.extend(la for la, _ in pairs)
        labels.extend(lb for _, lb in pairs)
        k = len(pairs)
        blocks.append(np.block([[np.zeros((k, k)), np.eye(k)], [np.eye(k), np.zeros((k, k))]]))
    n_delta = len(labels)
    if not embedded:
        perm = np.arange(n_delta)
        off = 0
        for b in blocks:
            k = b.shape[0] // 2
            perm[off:off + k] = np.arange(off + k, off + 2 * k)
            perm[off + k:off + 2 * k] = np.arange(off, off + k)
            off += 2 * k
        return ConnectionSystem(labels, perm=perm)
    free_labels: list[Label] = []
    conn_idx: list[np.ndarray] = []
    free_idx: list[np.ndarray] = []
    for name in embedded:
        cp = scheme.connected_ports(name)
        labels.extend(partner[(name, p)] for p in cp)
        fp = scheme.free_ports(name)
        free_labels.extend((name, p) for p in fp)
        conn_idx.append(np.asarray(cp, dtype=int))
        free_idx.append(np.asarray(fp, dtype=int))
    nc = len(labels)
    nf = len(free_labels)
    m = np.zeros((nc + nf, nc + nf), dtype=complex)
    m[:n_delta, :n_delta] = block_diag(blocks)
    c_off, f_off = n_delta, nc
    segments = []
    for name, ci, fi in zip(embedded, conn_idx, free_idx):
        segments.append((c_off, c_off + len(ci)))
        s = scheme.systems[name].to("S").matrix
        rows = np.concatenate([np.arange(c_off, c_off + len(ci)),
                               np.arange(f_off, f_off + len(fi))])
        ports = np.concatenate([ci, fi])
        m[np.ix_(rows, rows)] = s[np.ix_(ports, ports)]
        c_off += len(ci)
        f_off += len(fi)
    delta_perm = np.argmax(m[:n_delta, :n_delta].real, axis=1) if n_delta else np.zeros(0, int)
    return ConnectionSystem(labels, matrix=m, free_labels=free_labels, n_delta=n_delta,
                            delta_perm=delta_perm, segments=segments)


def quasi_delta(representation, con, epsilon: float = DEFAULT_EPSILON,
                reference=None) -> ConnectionSystem:
    """Impedance or admittance version of a delta-connection.

    The unit entries of the permutation are scaled by ``1 - epsilon`` and the
    result converted, which keeps ``I - S`` (resp. ``I + S``) invertible.

    Parameters
    ----------
    representation : {"Z", "Y"}
    con : ConnectionSystem or pairing
        A pure delta-connection, or a pairing accepted by :func:`delta_system`.
    epsilon : float
        Must satisfy ``0 < epsilon < 1``.
    reference : float or array_like, optional
        Reference impedance for the conversion (default 50).

    Raises
    ------
    InvalidEpsilon
        If ``epsilon`` is outside ``(0, 1)``.
    """
    if not (0.0 < float(epsilon) < 1.0):
        raise InvalidEpsilon(f"epsilon must lie in (0, 1), got {epsilon!r}")
    rep = Representation.parse(representation)
    if rep == Representation.S:
        raise ValueError("quasi_delta targets the Z or Y representation")
    if not isinstance(con, ConnectionSystem):
        con = delta_system(con)
    if not con.is_pure_permutation:
        raise ValueError("quasi_delta requires a pure delta-connection")
    s = (1.0 - float(epsilon)) * con.matrix
    m = z_from_s(s, reference) if rep == Representation.Z else y_from_s(s, reference)
    return ConnectionSystem(con.labels, matrix=m, representation=rep, reference=reference,
                            n_delta=con.n_connected)
