"""Port bookkeeping, network representations and S/Z/Y conversions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DeltaLikeSingularity,
    InvalidBlock,
    InvalidReference,
    PortSetMismatch,
    UnknownPortSet,
)
from .linalg import as_matrix, inverse, solve_linear

DEFAULT_Z0 = 50.0


class Representation(str, Enum):
    S = "S"
    Z = "Z"
    Y = "Y"

    @classmethod
    def parse(cls, value) -> "Representation":
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        aliases = {"scattering": "S", "impedance": "Z", "admittance": "Y"}
        key = aliases.get(key.lower(), key.upper())
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown representation {value!r}") from None


class PortPartition:
    """Named, disjoint, ordered port sets covering ``0..total_ports-1``.

    The label ``"P"`` always denotes all ports in ascending order.  ``"C"``
    denotes every port outside ``"N"`` unless it is declared explicitly.
    """

    def __init__(self, total_ports: int, sets: Mapping[str, Iterable[int]] | None = None):
        self.total_ports = int(total_ports)
        if self.total_ports < 0:
            raise PortSetMismatch("total_ports must be non-negative")
        self._sets: dict[str, tuple[int, ...]] = {}
        seen: dict[int, str] = {}
        for label, idx in (sets or {}).items():
            if label == "P":
                raise PortSetMismatch("'P' is reserved for the full port set")
            idx = tuple(int(i) for i in idx)
            for i in idx:
                if not 0 <= i < self.total_ports:
                    raise PortSetMismatch(f"port {i} of set {label!r} out of range")
                if i in seen:
                    raise PortSetMismatch(
                        f"port {i} appears in both {seen[i]!r} and {label!r}")
                seen[i] = label
            self._sets[label] = idx
        if len(seen) != self.total_ports:
            raise PortSetMismatch(
                f"port sets cover {len(seen)} of {self.total_ports} ports")

    @classmethod
    def simple(cls, free: Iterable[int], total: int) -> "PortPartition":
        """Partition with ``N = free`` and ``C`` = the remaining ports."""
        free = sorted(int(i) for i in free)
        rest = [i for i in range(total) if i not in set(free)]
        return cls(total, {"N": free, "C": rest})

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._sets)

    def __contains__(self, label: str) -> bool:
        return label in self._sets or label in ("P", "C", "N")

    def __getitem__(self, label: str) -> tuple[int, ...]:
        if label in self._sets:
            return self._sets[label]
        if label == "P":
            return tuple(range(self.total_ports))
        if label == "N":
            return ()
        if label == "C":
            n = set(self._sets.get("N", ()))
            out: list[int] = []
            for lab, idx in self._sets.items():
                if lab != "N":
                    out.extend(idx)
            return tuple(i for i in out if i not in n)
        raise UnknownPortSet(label)

    def indices(self, label: str) -> np.ndarray:
        return np.asarray(self[label], dtype=int)

    def as_dict(self) -> dict[str, list[int]]:
        return {k: list(v) for k, v in self._sets.items()}

    def __eq__(self, other) -> bool:
        return (isinstance(other, PortPartition)
                and self.total_ports == other.total_ports
                and self._sets == other._sets)

    def __repr__(self) -> str:
        return f"PortPartition({self.total_ports}, {self.as_dict()})"


def _reference_vector(reference, n: int) -> np.ndarray:
    z = np.asarray(DEFAULT_Z0 if reference is None else reference, dtype=complex)
    if z.ndim == 0:
        z = np.full(n, complex(z))
    if z.shape != (n,):
        raise InvalidReference(f"reference must be scalar or length {n}, got shape {z.shape}")
    if np.any(z.real <= 0) or not np.all(np.isfinite(z)):
        raise InvalidReference("reference impedances must have positive real part")
    return z


def _is_uniform_real(z: np.ndarray) -> bool:
    return z.size == 0 or (np.all(z.imag == 0) and np.all(z == z[0]))


@dataclass(frozen=True)
class NetworkSystem:
    """A multi-port system in one representation with its port partition.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
    partition : PortPartition, optional
        Defaults to a partition with every port free.
    representation : {"S", "Z", "Y"}
    reference : complex or array_like, optional
        Per-port reference impedance, used by conversions. Defaults to 50.
    name : str, optional
    """

    matrix: np.ndarray
    partition: PortPartition | None = None
    representation: Representation = Representation.S
    reference: np.ndarray | float | None = None
    name: str = ""

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidBlock(f"system matrix must be square, got {m.shape}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        part = self.partition
        if part is None:
            part = PortPartition(m.shape[0], {"N": range(m.shape[0])})
        elif isinstance(part, Mapping):
            part = PortPartition(m.shape[0], part)
        if part.total_ports != m.shape[0]:
            raise PortSetMismatch(
                f"partition covers {part.total_ports} ports, matrix has {m.shape[0]}")
        object.__setattr__(self, "partition", part)
        object.__setattr__(self, "representation", Representation.parse(self.representation))
        object.__setattr__(self, "reference", _reference_vector(self.reference, m.shape[0]))

    @property
    def n_ports(self) -> int:
        return self.matrix.shape[0]

    def block(self, row_set: str, col_set: str) -> np.ndarray:
        return partition_blocks(self, row_set, col_set)

    def with_matrix(self, matrix) -> "NetworkSystem":
        """Same partition, representation and reference, new matrix."""
        return NetworkSystem(matrix, self.partition, self.representation,
                             self.reference, self.name)

    def to(self, representation) -> "NetworkSystem":
        """Convert to another representation using the stored reference."""
        rep = Representation.parse(representation)
        if rep == self.representation:
            return self
        m = convert(self.matrix, self.representation, rep, self.reference)
        return NetworkSystem(m, self.partition, rep, self.reference, self.name)


def partition_blocks(sys: NetworkSystem, row_set: str, col_set: str) -> np.ndarray:
    """Return the sub-matrix selecting rows ``row_set`` and columns ``col_set``.

    Indices are taken in the sets' stored order.

    Raises
    ------
    UnknownPortSet
        If either label is not defined on the partition.
    """
    r = sys.partition.indices(row_set)
    c = sys.partition.indices(col_set)
    return sys.matrix[np.ix_(r, c)]


def s_from_z(Z, reference=None) -> np.ndarray:
    """Convert impedance parameters to power-wave scattering parameters.

    Uses ``S = F (Z - G^H)(Z + G)^{-1} F^{-1}`` with ``G = diag(z_i)`` and
    ``F = diag(1 / (2 sqrt(|Re z_i|)))``; for a uniform real reference this
    is ``(Z - z0)(Z + z0)^{-1}``.
    """
    Z = as_matrix(Z, name="Z")
    n = Z.shape[0]
    z = _reference_vector(reference, n)
    if _is_uniform_real(z):
        z0 = z[0].real if n else DEFAULT_Z0
        eye = np.eye(n, dtype=complex)
        # (Z - z0)(Z + z0)^{-1} = ((Z + z0)^{-T} (Z - z0)^T)^T
        return solve_linear((Z + z0 * eye).T, (Z - z0 * eye).T).T
    f = 1.0 / (2.0 * np.sqrt(np.abs(z.real)))
    num = Z - np.diag(z.conj())
    den = Z + np.diag(z)
    core = solve_linear(den.T, num.T).T
    return (f[:, None] * core) / f[None, :]


def z_from_s(S, reference=None) -> np.ndarray:
    """Convert scattering parameters to impedance parameters.

    Raises
    ------
    DeltaLikeSingularity
        If ``I - S`` is singular, e.g. for ideal delta-connections.
    """
    S = as_matrix(S, name="S")
    n = S.shape[0]
    z = _reference_vector(reference, n)
    eye = np.eye(n, dtype=complex)
    if _is_uniform_real(z):
        z0 = z[0].real if n else DEFAULT_Z0
        # Z0 (I + S)(I - S)^{-1}
        return z0 * solve_linear((eye - S).T, (eye + S).T, error=DeltaLikeSingularity).T
    f = 1.0 / (2.0 * np.sqrt(np.abs(z.real)))
    sp = (S * f[None, :]) / f[:, None]  # F^{-1} S F
    rhs = sp * z[None, :] + np.diag(z.conj())
    return solve_linear(eye - sp, rhs, error=DeltaLikeSingularity)


def y_from_z(Z) -> np.ndarray:
    """Admittance from impedance, ``Y = Z^{-1}``."""
    return inverse(Z)


def z_from_y(Y) -> np.ndarray:
    """Impedance from admittance, ``Z = Y^{-1}``."""
    return inverse(Y)


def y_from_s(S, reference=None) -> np.ndarray:
    """Admittance from scattering parameters.

    Raises
    ------
    DeltaLikeSingularity
        If ``S G + G^H`` is singular (``I + S`` singular for a real reference).
    """
    S = as_matrix(S, name="S")
    n = S.shape[0]
    z = _reference_vector(reference, n)
    eye = np.eye(n, dtype=complex)
    if _is_uniform_real(z):
        z0 = z[0].real if n else DEFAULT_Z0
        return solve_linear((eye + S).T, (eye - S).T, error=DeltaLikeSingularity).T / z0
    f = 1.0 / (2.0 * np.sqrt(np.abs(z.real)))
    sp = (S * f[None, :]) / f[:, None]
    den = sp * z[None, :] + np.diag(z.conj())
    return solve_linear(den, eye - sp, error=DeltaLikeSingularity)


def s_from_y(Y, reference=None) -> np.ndarray:
    """Scattering from admittance parameters."""
    Y = as_matrix(Y, name="Y")
    n = Y.shape[0]
    z = _reference_vector(reference, n)
    eye = np.eye(n, dtype=complex)
    if _is_uniform_real(z):
        y0 = 1.0 / (z[0].real if n else DEFAULT_Z0)
        # (I - Z0 Y)(I + Z0 Y)^{-1} = (y0 - Y)(y0 + Y)^{-1}
        return solve_linear((y0 * eye + Y).T, (y0 * eye - Y).T).T
    G = np.diag(z)
    return _s_from_y_general(Y, z, G)


def _s_from_y_general(Y, z, G) -> np.ndarray:
    # S = F (I - G^H Y)(I + G Y)^{-1} F^{-1}
    n = Y.shape[0]
    eye = np.eye(n, dtype=complex)
    f = 1.0 / (2.0 * np.sqrt(np.abs(z.real)))
    num = eye - np.diag(z.conj()) @ Y
    den = eye + G @ Y
    core = solve_linear(den.T, num.T).T
    return (f[:, None] * core) / f[None, :]


_CONVERTERS = {
    ("S", "Z"): z_from_s,
    ("S", "Y"): y_from_s,
    ("Z", "S"): s_from_z,
    ("Y", "S"): s_from_y,
}


def convert(matrix, src, dst, reference=None) -> np.ndarray:
    """Convert ``matrix`` between any two of the S/Z/Y representations."""
    src = Representation.parse(src).value
    dst = Representation.parse(dst).value
    m = as_matrix(matrix)
    if src == dst:
        return m.copy()
    if (src, dst) == ("Z", "Y"):
        return y_from_z(m)
    if (src, dst) == ("Y", "Z"):
        return z_from_y(m)
    return _CONVERTERS[(src, dst)](m, reference)


def waves_to_potential_flux(a, b, a_ports=None, b_ports=None):
    """Power-wave potential ``a + b`` and flux ``a - b``.

    Parameters
    ----------
    a, b : array_like
        Incident and outgoing waves over the same port set.
    a_ports, b_ports : sequence of int, optional
        Port labels of ``a`` and ``b``; if given they must coincide.

    Returns
    -------
    psi, phi : ndarray
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise PortSetMismatch(f"wave shapes differ: {a.shape} vs {b.shape}")
    if a_ports is not None and b_ports is not None and list(a_ports) != list(b_ports):
        raise PortSetMismatch("waves are defined over different port sets")
    return a + b, a - b
