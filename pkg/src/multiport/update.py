"""Woodbury updates of a cached connection when one subsystem changes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import CascadeCache, connect_supersystem
from .errors import InvalidReduction, PortSetMismatch, SingularUpdate
from .linalg import LUFactor, as_matrix
from .network import NetworkSystem

#: Chained updates between residual checks.
DRIFT_CHECK_INTERVAL = 64
#: Residual above which the cache is rebuilt from scratch.
DRIFT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SubsystemUpdate:
    """New matrix for one supersystem member.

    Parameters
    ----------
    name : str
        Member to replace.
    matrix : array_like
        New matrix, same size as the old one and in the same representation.
    """

    name: str
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, name="update matrix"))

    def delta_cc(self, cache: CascadeCache) -> np.ndarray:
        """``S'_CC - S_CC`` over the member's connected ports, in C order."""
        m = cache.sup.members[self.name]
        new = self.matrix[np.ix_(m.c_ports, m.c_ports)]
        return new - m.cc


def update_subsystem(cache: CascadeCache, upd: SubsystemUpdate):
    """Update a cached connection after one subsystem changed.

    Uses the rearrangement

    ``S̄' = S̄ + S̄[:, Cj] (I - ΔS S̄[Cj, Cj])^{-1} ΔS S̄[Cj, :]``

    with ``ΔS = S'_CjCj - S_CjCj``, so only an ``n(Cj)``-sized system is
    factorized and ``ΔS`` never needs to be invertible.

    Parameters
    ----------
    cache : CascadeCache
        From :func:`connect_supersystem` (global or reduced without free
        connection ports). Left untouched.
    upd : SubsystemUpdate

    Returns
    -------
    result : ndarray
        Updated scattering matrix over ``cache.sup.n_labels``.
    cache : CascadeCache
        A new cache.

    Raises
    ------
    InvalidReduction
        If ``upd.name`` is embedded in the connection system.
    SingularUpdate
        If ``I - ΔS S̄[Cj, Cj]`` is singular; re-evaluate from scratch.
    """
    if upd.name not in cache.sup.members:
        raise InvalidReduction(
            f"{upd.name!r} is not a supersystem member of this cache (embedded or unknown)")
    member = cache.sup.members[upd.name]
    if upd.matrix.shape != member.system.matrix.shape:
        raise PortSetMismatch(
            f"update for {upd.name!r} has shape {upd.matrix.shape}, "
            f"expected {member.system.matrix.shape}")
    new_sys = member.system.with_matrix(upd.matrix)
    sup = cache.sup.replace(upd.name, new_sys)
    dS = upd.delta_cc(cache)
    cj = member.c_pos
    if cj.size == 0 or not np.any(dS):
        sbar = cache.sbar
    else:
        k = cj.size
        small = np.eye(k) - dS @ cache.sbar[np.ix_(cj, cj)]
        gain = LUFactor(small, error=SingularUpdate).solve(dS)   # (I - ΔS S̄jj)^{-1} ΔS
        sbar = cache.sbar + cache.sbar[:, cj] @ (gain @ cache.sbar[cj, :])
    result = sup.nn + sup.nc_left(sup.cn_right(sbar))
    new = CascadeCache(sbar, sup, cache.con, result, cache.n_updates + 1)
    if new.n_updates % DRIFT_CHECK_INTERVAL == 0 and new.residual() > DRIFT_TOLERANCE:
        result, new = connect_supersystem(sup, cache.con, keep_cache=True)
    return result, new


def update_many(cache: CascadeCache, updates):
    """Apply updates one after another; returns the final result and cache."""
    result = cache.result
    for upd in updates:
        result, cache = update_subsystem(cache, upd)
    return result, cache


def replace_system(cache: CascadeCache, name: str, system: NetworkSystem | np.ndarray):
    """Convenience wrapper accepting a system or a bare matrix."""
    m = system.matrix if isinstance(system, NetworkSystem) else system
    return update_subsystem(cache, SubsystemUpdate(name, m))
