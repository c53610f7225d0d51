"""Random instances and independent oracles shared by the tests."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from multiport import ConnectionScheme, NetworkSystem, PortPartition


def rng(seed):
    return np.random.default_rng(seed)


def cmat(r, n, m=None):
    m = n if m is None else m
    return r.standard_normal((n, m)) + 1j * r.standard_normal((n, m))


def contraction(r, n, norm=0.9, symmetric=False):
    """Random matrix with spectral norm ``norm`` (passive scattering matrix)."""
    a = cmat(r, n)
    if symmetric:
        a = a + a.T
    if n == 0:
        return a
    return norm * a / np.linalg.norm(a, 2)


def unitary(r, n):
    q, rr = np.linalg.qr(cmat(r, n))
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


def symmetric_unitary(r, n):
    u = unitary(r, n)
    return u @ u.T


def well_conditioned(r, n):
    return cmat(r, n) + 2 * np.sqrt(n) * np.eye(n)


def brute_force(scheme: ConnectionScheme) -> np.ndarray:
    """Scattering matrix of a scheme by solving for every port wave at once.

    Unknowns are the incident and outgoing waves of every subsystem port;
    equations are each subsystem's ``b = S a``, the pairing ``a_i = b_j`` of
    joined ports and a unit excitation on one free port at a time.
    """
    names = scheme.names
    offs, tot = {}, 0
    for n in names:
        offs[n] = tot
        tot += scheme.systems[n].n_ports
    g = lambda lab: offs[lab[0]] + lab[1]
    free = [g(l) for l in scheme.free_labels()]
    partner = {g(a): g(b) for a, b in scheme.partner_map().items()}
    S = np.zeros((tot, tot), complex)
    for n in names:
        o = offs[n]
        k = scheme.systems[n].n_ports
        S[o:o + k, o:o + k] = scheme.systems[n].to("S").matrix
    A = np.zeros((2 * tot, 2 * tot), complex)
    A[:tot, :tot] = -S
    A[:tot, tot:] = np.eye(tot)
    row = tot
    for i, j in partner.items():
        A[row, i] = 1
        A[row, tot + j] = -1
        row += 1
    for i in free:
        A[row, i] = 1
        row += 1
    assert row == 2 * tot
    out = np.zeros((len(free), len(free)), complex)
    for c, i in enumerate(free):
        rhs = np.zeros(2 * tot, complex)
        rhs[2 * tot - len(free) + c] = 1
        x = np.linalg.solve(A, rhs)
        out[:, c] = x[tot + np.array(free)]
    return out


def random_chain(seed, lengths=(1, 2, 2, 1), sizes=None, symmetric=False, lossless=False):
    """Chain of subsystems joined end to end; each join has ``k`` ports."""
    r = rng(seed)
    n_sys = len(lengths)
    systems, joins = {}, []
    ks = [int(r.integers(1, 3)) for _ in range(n_sys - 1)] if sizes is None else list(sizes)
    for i in range(n_sys):
        left = ks[i - 1] if i > 0 else 0
        right = ks[i] if i < n_sys - 1 else 0
        nfree = lengths[i]
        n = nfree + left + right
        sets = {"N": range(nfree)}
        if left:
            sets["L"] = range(nfree, nfree + left)
        if right:
            sets["R"] = range(nfree + left, n)
        if lossless:
            m = symmetric_unitary(r, n) if symmetric else unitary(r, n)
        else:
            m = contraction(r, n, symmetric=symmetric)
        systems[f"S{i}"] = NetworkSystem(m, PortPartition(n, sets))
    for i in range(n_sys - 1):
        joins.append((f"S{i}", "R", f"S{i + 1}", "L"))
    return ConnectionScheme(systems, joins)


def random_scheme(seed, n_systems=None, symmetric=False, lossless=False, max_join=2):
    """Random connected scheme with arbitrary (possibly cyclic) topology."""
    r = rng(seed)
    n_sys = int(r.integers(2, 5)) if n_systems is None else n_systems
    edges = [(i, i + 1) for i in range(n_sys - 1)]
    for i in range(n_sys):
        for j in range(i + 2, n_sys):
            if r.random() < 0.4:
                edges.append((i, j))
    ksz = {e: int(r.integers(1, max_join + 1)) for e in edges}
    nfree = [int(r.integers(0, 3)) for _ in range(n_sys)]
    if sum(nfree) == 0:
        nfree[0] = 1
    sets = [{"N": list(range(nfree[i]))} for i in range(n_sys)]
    cur = list(nfree)
    for (i, j), k in ksz.items():
        sets[i][f"C{j}"] = list(range(cur[i], cur[i] + k))
        cur[i] += k
        sets[j][f"C{i}"] = list(range(cur[j], cur[j] + k))
        cur[j] += k
    systems = {}
    for i in range(n_sys):
        n = cur[i]
        if lossless:
            m = symmetric_unitary(r, n) if symmetric else unitary(r, n)
        else:
            m = contraction(r, n, symmetric=symmetric)
        systems[f"X{i}"] = NetworkSystem(m, PortPartition(n, sets[i]))
    joins = [(f"X{i}", f"C{j}", f"X{j}", f"C{i}") for (i, j) in edges]
    return ConnectionScheme(systems, joins)


seeds = st.integers(min_value=0, max_value=2**32 - 1)

ACCEPTANCE_LINES: list[str] = []


def record(number: int, passed: bool, detail: str) -> bool:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
