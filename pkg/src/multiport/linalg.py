"""Dense complex linear-algebra primitives.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Linear systems are solved with a partial-pivoted LU factorization; a cheap
condition estimate derived from the pivots guards against silently returning
garbage for (numerically) singular systems.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import InvalidBlock, SingularInteraction, SingularMatrix

#: Matrices whose pivot-based condition estimate exceeds this are rejected.
COND_LIMIT = 1e14


def as_matrix(a, *, name: str = "matrix", check_finite: bool = True) -> np.ndarray:
    """Coerce ``a`` to a 2-D ``complex128`` array.

    Raises
    ------
    InvalidBlock
        If ``a`` is not two-dimensional or contains NaN/Inf entries.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidBlock(f"{name} must be two-dimensional, got shape {m.shape}")
    if check_finite and m.size and not np.all(np.isfinite(m)):
        raise InvalidBlock(f"{name} contains non-finite entries")
    return m


@dataclass(frozen=True)
class BlockLayout:
    """Boundaries of the diagonal blocks of a block-structured square matrix.

    ``offsets[i]:offsets[i+1]`` is the index range of block ``i``; the first
    offset is 0 and the last equals the matrix dimension.  Empty blocks are
    allowed and show up as repeated offsets.
    """

    offsets: tuple[int, ...]

    def __post_init__(self):
        off = tuple(int(o) for o in self.offsets)
        if not off or off[0] != 0 or any(b < a for a, b in zip(off, off[1:])):
            raise InvalidBlock(f"invalid block offsets {off}")
        object.__setattr__(self, "offsets", off)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "BlockLayout":
        return cls(tuple(np.concatenate([[0], np.cumsum(sizes, dtype=int)])))

    @property
    def size(self) -> int:
        return self.offsets[-1]

    @property
    def nblocks(self) -> int:
        return len(self.offsets) - 1

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.offsets, self.offsets[1:]))

    def slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i + 1])


def block_diag(blocks: Sequence, return_layout: bool = False):
    """Assemble square blocks into a block-diagonal matrix.

    Parameters
    ----------
    blocks : sequence of array_like
        Square matrices, placed along the diagonal in order.
    return_layout : bool
        Also return the :class:`BlockLayout` describing the block boundaries.

    Returns
    -------
    out : ndarray
        The block-diagonal matrix (``0 x 0`` for an empty sequence).
    layout : BlockLayout
        Only if ``return_layout`` is true.
    """
    mats = [as_matrix(b, name=f"block {i}") for i, b in enumerate(blocks)]
    for i, m in enumerate(mats):
        if m.shape[0] != m.shape[1]:
            raise InvalidBlock(f"block {i} is not square: shape {m.shape}")
    layout = BlockLayout.from_sizes([m.shape[0] for m in mats])
    out = np.zeros((layout.size, layout.size), dtype=complex)
    for i, m in enumerate(mats):
        s = layout.slice(i)
        out[s, s] = m
    return (out, layout) if return_layout else out


class LUFactor:
    """Partial-pivoted LU factorization of a square matrix.

    Construction raises :class:`SingularMatrix` (or the subclass given as
    ``error``) when the pivot-based condition estimate exceeds
    :data:`COND_LIMIT`.
    """

    def __init__(self, A, *, error: type[SingularMatrix] = SingularMatrix,
                 cond_limit: float = COND_LIMIT):
        A = as_matrix(A, name="A")
        if A.shape[0] != A.shape[1]:
            raise InvalidBlock(f"coefficient matrix must be square, got {A.shape}")
        self.n = A.shape[0]
        if self.n == 0:
            self._lu = None
            self.condition = 1.0
            return
        with warnings.catch_warnings():
            # singularity is reported through our own exception below
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(A, check_finite=False)
        d = np.abs(np.diag(lu))
        dmin = d.min()
        self.condition = float("inf") if dmin == 0 else float(d.max() / dmin)
        # pivot ratio alone misses uniformly tiny pivots relative to A
        scale = np.abs(A).max()
        if dmin == 0 or self.condition > cond_limit or dmin < scale * np.finfo(float).eps:
            raise error(condition=self.condition if dmin else float("inf"))
        self._lu = (lu, piv)

    def solve(self, B, transpose: bool = False) -> np.ndarray:
        """Solve ``A X = B`` (or ``A^T X = B`` when ``transpose``)."""
        B = np.asarray(B, dtype=complex)
        if B.shape[0] != self.n:
            raise InvalidBlock(f"right-hand side has {B.shape[0]} rows, expected {self.n}")
        if self.n == 0:
            return np.zeros(B.shape, dtype=complex)
        return sla.lu_solve(self._lu, B, trans=1 if transpose else 0, check_finite=False)


def solve_linear(A, B, *, error: type[SingularMatrix] = SingularMatrix) -> np.ndarray:
    """Solve ``A X = B`` without forming ``A^{-1}``.

    Parameters
    ----------
    A : array_like, shape (n, n)
    B : array_like, shape (n, m) or (n,)

    Returns
    -------
    ndarray
        The solution ``X``, with the shape of ``B``.

    Raises
    ------
    SingularMatrix
        When ``A`` is singular to working precision. The exception carries
        the pivot-based condition estimate.
    """
    return LUFactor(A, error=error).solve(B)


def inverse(A, *, error: type[SingularMatrix] = SingularMatrix) -> np.ndarray:
    A = as_matrix(A)
    return solve_linear(A, np.eye(A.shape[0], dtype=complex), error=error)


def invert_offdiag_identity(A, B, form: str = "left") -> np.ndarray:
    """Invert ``[[A, I], [I, B]]`` through two half-size inverses.

    Parameters
    ----------
    A, B : array_like, shape (n, n)
    form : {"left", "right"}
        ``"left"`` computes ``[[B, -I], [-I, A]] @ diag(X_AB, X_BA)`` and
        ``"right"`` computes ``diag(X_BA, X_AB) @ [[B, -I], [-I, A]]`` where
        ``X_AB = (AB - I)^{-1}`` and ``X_BA = (BA - I)^{-1}``.

    Raises
    ------
    SingularInteraction
        If ``AB - I`` is singular.
    """
    A = as_matrix(A, name="A")
    B = as_matrix(B, name="B")
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise InvalidBlock(f"A and B must be square and equal-sized, got {A.shape}, {B.shape}")
    eye = np.eye(n, dtype=complex)
    x_ab = inverse(A @ B - eye, error=SingularInteraction)
    x_ba = inverse(B @ A - eye, error=SingularInteraction)
    out = np.empty((2 * n, 2 * n), dtype=complex)
    if form == "left":
        out[:n, :n] = B @ x_ab
        out[:n, n:] = -x_ba
        out[n:, :n] = -x_ab
        out[n:, n:] = A @ x_ba
    elif form == "right":
        out[:n, :n] = x_ba @ B
        out[:n, n:] = -x_ba
        out[n:, :n] = -x_ab
        out[n:, n:] = x_ab @ A
    else:
        raise ValueError(f"unknown form {form!r}")
    return out


def rel_error(x, ref) -> float:
    """Frobenius-relative error ``||x - ref||_F / ||ref||_F``."""
    x = np.asarray(x)
    ref = np.asarray(ref)
    den = np.linalg.norm(ref)
    num = np.linalg.norm(x - ref)
    return float(num / den) if den else float(num)


def rel_std_error(x, ref) -> float:
    """Relative standard error ``std(x - ref) / mean(|ref|)`` over all entries."""
    x = np.asarray(x)
    ref = np.asarray(ref)
    den = np.mean(np.abs(ref))
    num = np.std(x - ref)
    return float(num / den) if den else float(num)
