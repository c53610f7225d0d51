"""Evaluation strategies for a connection scheme.

* global: one supersystem of all subsystems, one delta-connection.
* reduced: non-adjacent subsystems move into the connection system.
* iterative: fold subsystems one at a time with the star product.

All strategies return the result over the scheme's free ports in canonical
order (systems in declared order, ports ascending).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cascade import (
    Supersystem,
    connect_supersystem,
    star_blocks,
    star_zy_blocks,
)
from .connection import (
    DEFAULT_EPSILON,
    ConnectionScheme,
    ConnectionSystem,
    Join,
    Label,
    check_non_adjacent,
    embed_connection,
    global_connection,
    quasi_delta,
)
from .errors import InvalidScheme, SingularInteraction
from .linalg import LUFactor, block_diag
from .network import Representation

OBJECTIVES = ("none", "prefer-closed-ports", "max-reduction")


@dataclass(frozen=True)
class ReductionPlan:
    """Which subsystems stay in the supersystem and which join the connection.

    Attributes
    ----------
    supersystem : tuple of str
    connection : tuple of str
        Embedded subsystems, pairwise non-adjacent.
    remaining_joins : tuple of Join
        Delta-joins not absorbed by an embedded subsystem.
    fully_reduced : bool
    requires_star : bool
        True when an embedded subsystem keeps free ports.
    """

    supersystem: tuple[str, ...]
    connection: tuple[str, ...]
    remaining_joins: tuple[Join, ...]
    fully_reduced: bool
    requires_star: bool

    @property
    def is_global(self) -> bool:
        return not self.connection


def _adjacency(scheme: ConnectionScheme) -> dict[str, set[str]]:
    return {n: scheme.neighbours(n) for n in scheme.names}


def two_colouring(scheme: ConnectionScheme) -> dict[str, int] | None:
    """Bipartition of the connection graph, or ``None`` if it has an odd cycle."""
    adj = _adjacency(scheme)
    colour: dict[str, int] = {}
    for start in scheme.names:
        if start in colour:
            continue
        colour[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in colour:
                    colour[v] = 1 - colour[u]
                    queue.append(v)
                elif colour[v] == colour[u]:
                    return None
    return colour


def make_plan(scheme: ConnectionScheme, embedded: Sequence[str]) -> ReductionPlan:
    """Plan for an explicit choice of embedded subsystems."""
    emb = [n for n in scheme.names if n in set(embedded)]
    for n in embedded:
        if n not in scheme.systems:
            raise InvalidScheme(f"unknown system {n!r}")
    check_non_adjacent(scheme, emb)
    # isolated subsystems gain nothing from embedding
    emb = [n for n in emb if scheme.joins_of(n)]
    es = set(emb)
    remaining = tuple(j for j in scheme.joins if j.sys_a not in es and j.sys_b not in es)
    sup = tuple(n for n in scheme.names if n not in es)
    return ReductionPlan(
        supersystem=sup,
        connection=tuple(emb),
        remaining_joins=remaining,
        fully_reduced=bool(emb) and not remaining,
        requires_star=any(scheme.free_ports(n) for n in emb),
    )


def plan_reduction(scheme: ConnectionScheme, objective: str = "max-reduction") -> ReductionPlan:
    """Choose subsystems to treat as part of the connection system.

    Parameters
    ----------
    scheme : ConnectionScheme
        If ``scheme.embedded`` is non-empty it is used as a manual override.
    objective : {"none", "prefer-closed-ports", "max-reduction"}
        ``"none"`` returns the global plan.  ``"max-reduction"`` embeds one
        colour class when the connection graph is bipartite (full
        reduction) and otherwise a greedy maximal independent set ordered by
        descending connected-port count.  ``"prefer-closed-ports"`` runs the
        greedy selection but favours subsystems without free ports.

    Returns
    -------
    ReductionPlan
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    if scheme.embedded:
        return make_plan(scheme, scheme.embedded)
    if objective == "none" or not scheme.joins:
        return make_plan(scheme, ())
    ncon = {n: len(scheme.connected_ports(n)) for n in scheme.names}
    has_free = {n: bool(scheme.free_ports(n)) for n in scheme.names}
    order = {n: i for i, n in enumerate(scheme.names)}
    if objective == "max-reduction":
        colour = two_colouring(scheme)
        if colour is not None:
            chosen = []
            # per connected component pick the class with fewer free ports,
            # ties go to the class holding the earliest declared subsystem
            for comp in _components(scheme):
                classes = [[n for n in comp if colour[n] == c] for c in (0, 1)]
                key = lambda cl: (sum(has_free[n] for n in cl), min(order[n] for n in cl))
                classes = [cl for cl in classes if cl]
                chosen.extend(min(classes, key=key))
            return make_plan(scheme, chosen)
        key = lambda n: (-ncon[n], order[n])
    else:
        key = lambda n: (has_free[n], -ncon[n], order[n])
    adj = _adjacency(scheme)
    chosen: list[str] = []
    blocked: set[str] = set()
    for n in sorted((n for n in scheme.names if ncon[n]), key=key):
        if n not in blocked:
            chosen.append(n)
            blocked |= adj[n] | {n}
    return make_plan(scheme, chosen)


def _components(scheme: ConnectionScheme) -> list[list[str]]:
    adj = _adjacency(scheme)
    seen: set[str] = set()
    comps = []
    for s in scheme.names:
        if s in seen or not adj[s]:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(sorted(comp, key=scheme.names.index))
    return comps


def _reorder(result: np.ndarray, labels: Sequence[Label], canonical: Sequence[Label]) -> np.ndarray:
    if list(labels) == list(canonical):
        return result
    pos = {l: i for i, l in enumerate(labels)}
    idx = np.array([pos[l] for l in canonical], dtype=int)
    return result[np.ix_(idx, idx)]


def build_global(scheme: ConnectionScheme, representation="S"):
    con = global_connection(scheme)
    sup = Supersystem.from_scheme(scheme, scheme.names, con.labels, representation)
    return sup, con


def build_reduced(scheme: ConnectionScheme, plan: ReductionPlan, representation="S"):
    con = embed_connection(scheme, plan.connection)
    sup = Supersystem.from_scheme(scheme, plan.supersystem, con.labels, representation)
    return sup, con


def evaluate(scheme: ConnectionScheme, plan: ReductionPlan | None = None,
             keep_cache: bool = True):
    """Evaluate the scattering matrix of a connection scheme.

    Parameters
    ----------
    scheme : ConnectionScheme
    plan : ReductionPlan, optional
        Defaults to the global plan.
    keep_cache : bool
        Keep the interaction inverse for updates and wave recovery.

    Returns
    -------
    result : ndarray
        Over the free ports in canonical order.
    cache : CascadeCache or None
        ``None`` on the star path or when ``keep_cache`` is false.
    """
    plan = make_plan(scheme, ()) if plan is None else plan
    canonical = scheme.free_labels()
    if plan.is_global:
        sup, con = build_global(scheme)
        res, cache = connect_supersystem(sup, con, keep_cache)
        return _reorder(res, sup.n_labels, canonical), cache
    sup, con = build_reduced(scheme, plan)
    if not plan.requires_star:
        res, cache = connect_supersystem(sup, con, keep_cache)
        return _reorder(res, sup.n_labels, canonical), cache
    vcc, vcn, vnc, vnn = con.blocks()
    res = star_blocks(sup.nn, sup.nc, sup.cn, sup.cc, vnn, vnc, vcn, vcc)
    return _reorder(res, sup.n_labels + con.free_labels, canonical), None


def _fold_order(scheme: ConnectionScheme, order) -> list[str]:
    order = list(scheme.names if order is None else order)
    if sorted(order) != sorted(scheme.names):
        raise InvalidScheme("fold order must list every subsystem exactly once")
    return order


def iterative_cascade(scheme: ConnectionScheme, order: Sequence[str] | None = None,
                      representation="S") -> np.ndarray:
    """Fold subsystems one at a time with the star product.

    At each step every join between the accumulated network and the next
    subsystem is made at once.

    Parameters
    ----------
    scheme : ConnectionScheme
    order : sequence of str, optional
        Fold order; defaults to the declared order.
    representation : {"S", "Z", "Y"}
        Star product variant to use.

    Returns
    -------
    ndarray
        Result over the free ports in canonical order.
    """
    rep = Representation.parse(representation)
    order = _fold_order(scheme, order)
    partner = scheme.partner_map()
    first = order[0]
    acc = scheme.systems[first].to(rep).matrix
    acc_labels: list[Label] = [(first, p) for p in range(acc.shape[0])]
    for name in order[1:]:
        vm = scheme.systems[name].to(rep).matrix
        pos = {l: i for i, l in enumerate(acc_labels)}
        cu, cv = [], []
        for p in range(vm.shape[0]):
            other = partner.get((name, p))
            if other is not None and other in pos:
                cu.append(pos[other])
                cv.append(p)
        cu_a, cv_a = np.array(cu, dtype=int), np.array(cv, dtype=int)
        nu = np.setdiff1d(np.arange(acc.shape[0]), cu_a)
        nv = np.setdiff1d(np.arange(vm.shape[0]), cv_a)
        ub = (acc[np.ix_(nu, nu)], acc[np.ix_(nu, cu_a)], acc[np.ix_(cu_a, nu)], acc[np.ix_(cu_a, cu_a)])
        vb = (vm[np.ix_(nv, nv)], vm[np.ix_(nv, cv_a)], vm[np.ix_(cv_a, nv)], vm[np.ix_(cv_a, cv_a)])
        if rep == Representation.S:
            acc = star_blocks(*ub, *vb)
        else:
            acc = star_zy_blocks(*ub, *vb, 1.0 if rep == Representation.Z else -1.0)
        acc_labels = [acc_labels[i] for i in nu] + [(name, int(p)) for p in nv]
    return _reorder(acc, acc_labels, scheme.free_labels())


def _zy_connection(scheme: ConnectionScheme, plan: ReductionPlan, rep: Representation,
                   epsilon: float, reference) -> ConnectionSystem:
    """Connection system in Z or Y form: quasi-delta blocks plus embedded systems."""
    if plan.is_global:
        return quasi_delta(rep, global_connection(scheme), epsilon, reference)
    con = embed_connection(scheme, plan.connection)
    m = con.matrix.copy()
    nd = con.n_delta
    if nd:
        delta = ConnectionSystem(con.labels[:nd], perm=np.argmax(m[:nd, :nd].real, axis=1))
        m[:nd, :nd] = quasi_delta(rep, delta, epsilon, reference).matrix
    c_off, f_off = nd, con.n_connected
    for name in plan.connection:
        cp = scheme.connected_ports(name)
        fp = scheme.free_ports(name)
        sysm = scheme.systems[name].to(rep).matrix
        rows = np.concatenate([np.arange(c_off, c_off + len(cp)), np.arange(f_off, f_off + len(fp))])
        ports = np.concatenate([cp, fp]).astype(int)
        m[np.ix_(rows, rows)] = sysm[np.ix_(ports, ports)]
        c_off += len(cp)
        f_off += len(fp)
    return ConnectionSystem(con.labels, matrix=m, free_labels=con.free_labels,
                            representation=rep, reference=reference, n_delta=nd)


def evaluate_zy(scheme: ConnectionScheme, plan: ReductionPlan | None = None,
                representation="Z", epsilon: float = DEFAULT_EPSILON,
                reference=None) -> np.ndarray:
    """Evaluate a scheme in the impedance or admittance representation.

    Remaining delta-joins are replaced by quasi-delta-connections with the
    given ``epsilon``; subsystems are converted with their own reference.

    Returns
    -------
    ndarray
        Z (or Y) matrix over the free ports in canonical order.
    """
    rep = Representation.parse(representation)
    if rep == Representation.S:
        raise ValueError("use evaluate() for the scattering representation")
    plan = make_plan(scheme, ()) if plan is None else plan
    canonical = scheme.free_labels()
    con = _zy_connection(scheme, plan, rep, epsilon, reference)
    sup = Supersystem.from_scheme(scheme, plan.supersystem, con.labels, rep)
    vcc, vcn, vnc, vnn = con.blocks()
    if sup.n_c == 0:
        res = block_diag([sup.nn, vnn])
    elif not con.n_free:
        lu = LUFactor(sup.cc + vcc, error=SingularInteraction)
        res = sup.nn - sup.nc_left(lu.solve(sup.cn))
    else:
        sign = 1.0 if rep == Representation.Z else -1.0
        res = star_zy_blocks(sup.nn, sup.nc, sup.cn, sup.cc, vnn, vnc, vcn, vcc, sign)
    return _reorder(res, sup.n_labels + con.free_labels, canonical)


def evaluate_impedance(scheme, plan=None, epsilon: float = DEFAULT_EPSILON, reference=None):
    """Impedance matrix of the connected network (see :func:`evaluate_zy`)."""
    return evaluate_zy(scheme, plan, "Z", epsilon, reference)


def evaluate_admittance(scheme, plan=None, epsilon: float = DEFAULT_EPSILON, reference=None):
    """Admittance matrix of the connected network (see :func:`evaluate_zy`)."""
    return evaluate_zy(scheme, plan, "Y", epsilon, reference)
