"""Analytic scattering of transmission-line networks (quantum graphs).

A graph is a set of nodes joined by one-dimensional bonds.  Waves satisfy
continuity of the potential and conservation of flux at every node.  Some
nodes are external and carry a port (a semi-infinite lead).

Conventions
-----------
``psi_l = (I + S) a`` and ``phi_l = (I - S) a`` at the external nodes, where
``phi`` is the nodal flux leaving the node into its bonds.  With ``M`` the
nodal flux matrix and ``W`` the external-node selector this gives

    Psi = 2 (M + W^T W)^{-1} W^T,    S = W Psi - I.

Under this sign convention, joining two graphs by a delta-connection is the
same as merging the paired nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    GenerationFailed,
    InvalidGluing,
    InvalidGraph,
    InvalidSubset,
    ResonantBond,
    ResonantGraph,
)
from .linalg import LUFactor

RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """Transmission-line network.

    Parameters
    ----------
    nodes : array_like, shape (n, 2)
        Node positions (only used to derive bond lengths for random graphs).
    bonds : sequence of (i, j, length)
    external : sequence of int
        External nodes; port ``p`` sits on node ``external[p]``.
    """

    nodes: np.ndarray
    bonds: tuple[tuple[int, int, float], ...]
    external: tuple[int, ...]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        bonds = tuple((int(i), int(j), float(l)) for i, j, l in self.bonds)
        external = tuple(int(e) for e in self.external)
        n = nodes.shape[0]
        for i, j, l in bonds:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidGraph(f"bond ({i}, {j}) references a missing node")
            if i == j:
                raise InvalidGraph(f"self-loop at node {i}")
            if not (l > 0 and math.isfinite(l)):
                raise InvalidGraph(f"bond ({i}, {j}) has non-positive length {l}")
        if len(set(external)) != len(external) or any(not 0 <= e < n for e in external):
            raise InvalidGraph("external nodes must be distinct existing nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "bonds", bonds)
        object.__setattr__(self, "external", external)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_ports(self) -> int:
        return len(self.external)

    @property
    def internal(self) -> tuple[int, ...]:
        ext = set(self.external)
        return tuple(i for i in range(self.n_nodes) if i not in ext)

    def degree(self) -> np.ndarray:
        d = np.zeros(self.n_nodes, dtype=int)
        for i, j, _ in self.bonds:
            d[i] += 1
            d[j] += 1
        return d

    def selector(self) -> np.ndarray:
        """``W`` with ``W[p, external[p]] = 1``."""
        w = np.zeros((self.n_ports, self.n_nodes))
        w[np.arange(self.n_ports), list(self.external)] = 1.0
        return w

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "bonds": [[i, j, l] for i, j, l in self.bonds],
            "external": list(self.external),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        return cls(np.asarray(data["nodes"], dtype=float).reshape(-1, 2),
                   tuple(tuple(b) for b in data["bonds"]), tuple(data["external"]))


@dataclass(frozen=True)
class GraphSolution:
    M: np.ndarray
    Psi: np.ndarray
    S: np.ndarray


def _bond_terms(length: float, k: complex) -> tuple[complex, complex]:
    s = np.sin(k * length)
    if abs(s) < RESONANCE_TOL:
        raise ResonantBond(f"bond of length {length} is resonant at k = {k}")
    return np.cos(k * length) / s, 1.0 / s


def graph_m_matrix(g: Graph, k: complex) -> np.ndarray:
    """Nodal flux matrix ``M`` with ``phi = M psi``.

    ``M_aa = j sum cot(k l)`` over bonds at ``a`` and ``M_ab = -j csc(k l_ab)``
    summed over the bonds joining ``a`` and ``b``.

    Raises
    ------
    ResonantBond
        If ``|sin(k l)| < 1e-12`` for some bond.
    """
    k = complex(k)
    m = np.zeros((g.n_nodes, g.n_nodes), dtype=complex)
    for i, j, l in g.bonds:
        cot, csc = _bond_terms(l, k)
        m[i, i] += 1j * cot
        m[j, j] += 1j * cot
        m[i, j] -= 1j * csc
        m[j, i] -= 1j * csc
    return m


def graph_scattering(g: Graph, k: complex) -> GraphSolution:
    """Scattering matrix and node-potential response of a graph.

    Returns
    -------
    GraphSolution
        ``M``, ``Psi`` (nodes x ports) and ``S`` (ports x ports).

    Raises
    ------
    ResonantBond, ResonantGraph
    """
    m = graph_m_matrix(g, k)
    w = g.selector()
    a = m.copy()
    ext = list(g.external)
    a[ext, ext] += 1.0
    lu = LUFactor(a, error=ResonantGraph)
    psi = 2.0 * lu.solve(w.T.astype(complex))
    s = psi[ext, :] - np.eye(g.n_ports)
    return GraphSolution(m, psi, s)


def bond_fluxes(g: Graph, k: complex, Psi: np.ndarray) -> np.ndarray:
    """Flux leaving each bond end into the bond, per unit excitation.

    Returns
    -------
    ndarray, shape (n_bonds, 2, n_ports)
        ``[b, 0]`` is the flux from node ``i`` into bond ``b = (i, j)``,
        ``[b, 1]`` that from node ``j``.
    """
    out = np.zeros((len(g.bonds), 2, Psi.shape[1]), dtype=complex)
    for b, (i, j, l) in enumerate(g.bonds):
        cot, csc = _bond_terms(l, complex(k))
        out[b, 0] = 1j * (cot * Psi[i] - csc * Psi[j])
        out[b, 1] = 1j * (cot * Psi[j] - csc * Psi[i])
    return out


def subgraph_interface(g: Graph, k: complex, s: Sequence[int], a,
                       bonds: Iterable[int] | None = None):
    """Potentials and fluxes at interface nodes of a subgraph.

    Parameters
    ----------
    g : Graph
    k : complex
    s : sequence of int
        Internal nodes at which to report.
    a : array_like, shape (n_ports,) or (n_ports, m)
        Incident waves on the ports of ``g``.
    bonds : iterable of int, optional
        Bond indices over which fluxes are summed.  Defaults to every bond
        joining a node of ``s`` to an internal node.

    Returns
    -------
    psi_s, phi_s : ndarray
        Node potentials and the summed flux leaving each node of ``s`` into
        the selected bonds.

    Raises
    ------
    InvalidSubset
        If ``s`` contains an external node.
    """
    s = [int(x) for x in s]
    ext = set(g.external)
    if any(x in ext for x in s):
        raise InvalidSubset("interface nodes must be internal")
    if any(not 0 <= x < g.n_nodes for x in s):
        raise InvalidSubset("interface node out of range")
    sol = graph_scattering(g, k)
    a = np.asarray(a, dtype=complex)
    flux = bond_fluxes(g, k, sol.Psi)
    if bonds is None:
        internal = set(g.internal)
        bonds = [b for b, (i, j, _) in enumerate(g.bonds) if i in internal and j in internal]
    bonds = list(bonds)
    phi_map = np.zeros((len(s), g.n_ports), dtype=complex)
    row = {node: r for r, node in enumerate(s)}
    for b in bonds:
        i, j, _ = g.bonds[b]
        if i in row:
            phi_map[row[i]] += flux[b, 0]
        if j in row:
            phi_map[row[j]] += flux[b, 1]
    psi_map = sol.Psi[s]
    return psi_map @ a, phi_map @ a


@dataclass
class GlueResult:
    graph: Graph
    node_maps: list = field(default_factory=list)
    bond_maps: list = field(default_factory=list)


def glue_many(graphs: Sequence[Graph], pairing) -> GlueResult:
    """Merge several graphs by identifying paired external nodes.

    Parameters
    ----------
    graphs : sequence of Graph
    pairing : iterable of ((gi, node_i), (gj, node_j))
        Each pair names an external node of graph ``gi`` and one of ``gj``.

    Returns
    -------
    GlueResult
        The merged graph plus, per input graph, the map from its node and
        bond indices to those of the merged graph.  Nodes keep their order
        (graph by graph); a merged pair lives at the first node's index.
        Unpaired external nodes stay external, in graph then port order.
    """
    pairing = [(tuple(p), tuple(q)) for p, q in pairing]
    rep: dict[tuple[int, int], tuple[int, int]] = {}
    used: set[tuple[int, int]] = set()
    for p, q in pairing:
        for gi, node in (p, q):
            if not 0 <= gi < len(graphs):
                raise InvalidGluing(f"graph index {gi} out of range")
            if node not in graphs[gi].external:
                raise InvalidGluing(f"node {node} of graph {gi} is not external")
            if (gi, node) in used:
                raise InvalidGluing(f"node {node} of graph {gi} glued twice")
            used.add((gi, node))
        if p == q:
            raise InvalidGluing("cannot glue a node to itself")
        first, second = (p, q) if p < q else (q, p)
        rep[second] = first
    index: dict[tuple[int, int], int] = {}
    positions = []
    for gi, g in enumerate(graphs):
        for node in range(g.n_nodes):
            if (gi, node) in rep:
                continue
            index[(gi, node)] = len(positions)
            positions.append(g.nodes[node])
    for key, target in rep.items():
        index[key] = index[target]
    bonds = []
    node_maps, bond_maps = [], []
    for gi, g in enumerate(graphs):
        node_maps.append(np.array([index[(gi, n)] for n in range(g.n_nodes)], dtype=int))
        bmap = []
        for i, j, l in g.bonds:
            bmap.append(len(bonds))
            bonds.append((index[(gi, i)], index[(gi, j)], l))
        bond_maps.append(np.array(bmap, dtype=int))
    external = [index[(gi, e)] for gi, g in enumerate(graphs) for e in g.external
                if (gi, e) not in used]
    merged = Graph(np.asarray(positions).reshape(-1, 2), tuple(bonds), tuple(external))
    return GlueResult(merged, node_maps, bond_maps)


def glue_graphs(g1: Graph, g2: Graph, pairing) -> Graph:
    """Merge ``g1`` and ``g2`` by identifying pairs ``(node of g1, node of g2)``.

    Raises
    ------
    InvalidGluing
        If a paired node is not external.
    """
    return glue_many([g1, g2], [((0, a), (1, b)) for a, b in pairing]).graph


def random_graph(n_ports: int, density: float = 0.5, seed=None, k_check: complex | None = None,
                 max_tries: int = 100) -> Graph:
    """Random all-external graph on the unit square.

    Nodes are placed uniformly in ``[0, 1]^2``; ``ceil(density * n(n-1)/2)``
    distinct node pairs are bonded with lengths equal to the Euclidean
    distances.  The bond set is redrawn (positions kept) until every node has
    a bond and, if ``k_check`` is given, no bond is resonant at ``k_check``.

    Parameters
    ----------
    n_ports : int
        Number of nodes, all external; port ``p`` is node ``p``.
    density : float
        Fraction of node pairs that get a bond, ``0 < density <= 1``.
    seed : int, SeedSequence or Generator, optional
    k_check : complex, optional
    max_tries : int

    Raises
    ------
    GenerationFailed
        If no admissible bond set is found within ``max_tries`` draws.
    """
    if n_ports < 2:
        raise InvalidGraph("a random graph needs at least two nodes")
    if not 0 < density <= 1:
        raise InvalidGraph("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    pos = rng.random((n_ports, 2))
    iu, ju = np.triu_indices(n_ports, 1)
    n_pairs = iu.size
    n_bonds = max(1, math.ceil(density * n_pairs - 1e-12))
    lengths_all = np.hypot(*(pos[iu] - pos[ju]).T)
    for _ in range(max_tries):
        pick = np.sort(rng.choice(n_pairs, size=n_bonds, replace=False))
        deg = np.bincount(np.concatenate([iu[pick], ju[pick]]), minlength=n_ports)
        if np.any(deg == 0):
            continue
        lengths = lengths_all[pick]
        if np.any(lengths <= 0):
            continue
        if k_check is not None and np.any(np.abs(np.sin(complex(k_check) * lengths)) < RESONANCE_TOL):
            continue
        bonds = tuple((int(i), int(j), float(l)) for i, j, l in zip(iu[pick], ju[pick], lengths))
        return Graph(pos, bonds, tuple(range(n_ports)))
    raise GenerationFailed(f"no admissible bond set after {max_tries} attempts")
