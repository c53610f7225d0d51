"""The four-subsystem benchmark network built from random graphs.

Subsystems and port sets (each set holds ``n_bus`` ports):

* A: ``N``, ``C_B``, ``C_D``
* B: ``N``, ``C_A``, ``C_D``
* C: ``N``, ``C_D``
* D: ``N``, ``C_A``, ``C_B``, ``C_C`` (the modified variant drops ``N``)

Joins in order: A-B, A-D, B-D, C-D.  Sets are laid out in the order listed
so port ``p`` of a subsystem is node ``p`` of its graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import ConnectionScheme
from .graph import Graph, glue_many, graph_scattering, random_graph
from .network import NetworkSystem, PortPartition

DEFAULT_K = 3 + 0.05j

LAYOUT = {
    "A": ("N", "C_B", "C_D"),
    "B": ("N", "C_A", "C_D"),
    "C": ("N", "C_D"),
    "D": ("N", "C_A", "C_B", "C_C"),
}
JOINS = (("A", "C_B", "B", "C_A"), ("A", "C_D", "D", "C_A"),
         ("B", "C_D", "D", "C_B"), ("C", "C_D", "D", "C_C"))


def layout(name: str, modified: bool = False) -> tuple[str, ...]:
    sets = LAYOUT[name]
    if modified and name == "D":
        sets = sets[1:]
    return sets


def partition_for(name: str, n_bus: int, modified: bool = False) -> PortPartition:
    sets = layout(name, modified)
    return PortPartition(len(sets) * n_bus,
                         {s: range(i * n_bus, (i + 1) * n_bus) for i, s in enumerate(sets)})


@dataclass
class MetaNetwork:
    """Random instance of the benchmark network.

    Attributes
    ----------
    n_bus : int
    k : complex
    modified : bool
    graphs : dict of str to Graph
    scheme : ConnectionScheme
        Scattering subsystems taken from the graphs.
    """

    n_bus: int
    k: complex
    modified: bool
    graphs: dict
    scheme: ConnectionScheme

    def oracle(self):
        """Glued graph and its scattering solution (ground truth)."""
        glued = self.glued()
        return glued.graph, graph_scattering(glued.graph, self.k)

    def glued(self):
        names = list(self.graphs)
        idx = {n: i for i, n in enumerate(names)}
        pairing = []
        for j in self.scheme.joins:
            for (sa, pa), (sb, pb) in self.scheme.pairs(j):
                pairing.append(((idx[sa], pa), (idx[sb], pb)))
        return glue_many([self.graphs[n] for n in names], pairing)

    def regenerate(self, name: str, seed) -> tuple[NetworkSystem, Graph]:
        """Fresh random subsystem with the same ports as ``name``."""
        g = random_graph(self.graphs[name].n_ports, 0.5, seed, self.k)
        return NetworkSystem(graph_scattering(g, self.k).S,
                             self.scheme.systems[name].partition, name=name), g


def subsystem_seeds(seed, count: int = 4):
    return np.random.SeedSequence(seed).spawn(count)


def build_meta_network(n_bus: int, seed=0, k: complex = DEFAULT_K, modified: bool = False,
                       density: float = 0.5) -> MetaNetwork:
    """Generate random subsystem graphs and the connection scheme.

    Parameters
    ----------
    n_bus : int
        Ports per joined or free set.
    seed : int
        Subsystem graphs use independent child seeds of this seed.
    k : complex
        Wavevector.
    modified : bool
        Drop the free ports of D.
    """
    k = complex(k)
    graphs, systems = {}, {}
    for name, ss in zip(LAYOUT, subsystem_seeds(seed)):
        part = partition_for(name, n_bus, modified)
        g = random_graph(part.total_ports, density, ss, k)
        graphs[name] = g
        systems[name] = NetworkSystem(graph_scattering(g, k).S, part, name=name)
    return MetaNetwork(n_bus, k, modified, graphs, ConnectionScheme(systems, JOINS))
