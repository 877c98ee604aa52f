"""Involutive isometries, their eigenlattices, and brute-force enumeration."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import BoxTooLarge, InputError, NotInvolutive, NotIsometry, SearchSpaceTooLarge
from .lattice_core import (
    BOX_CAP,
    Lattice,
    Signature,
    exact_signature,
    integer_det,
    integer_kernel,
    integer_vectors_in_box,
    signature,
)


class EnumerationIncompleteWarning(UserWarning):
    """The enumerated list is only complete relative to the entry bound."""


@dataclass(frozen=True)
class Involution:
    matrix: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.matrix, dtype=float)
        a.setflags(write=False)
        return a

    def apply(self, x) -> np.ndarray:
        return self.array @ np.asarray(x, dtype=float)

    def apply_int(self, x) -> tuple[int, ...]:
        return tuple(sum(row[j] * x[j] for j in range(self.rank)) for row in self.matrix)

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix]}


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def _transpose(a):
    return [list(col) for col in zip(*a)]


def validate_involution(lat: Lattice, m) -> Involution:
    rows = [list(r) for r in m]
    n = lat.rank
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError(f"involution must be a {n}x{n} integer matrix")
    for r in rows:
        for x in r:
            if isinstance(x, bool) or int(x) != x:
                raise InputError(f"involution entries must be integers, got {x!r}")
    rows = [[int(x) for x in r] for r in rows]
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    if _matmul(rows, rows) != ident:
        raise NotInvolutive("matrix does not square to the identity")
    gram = [list(r) for r in lat.gram]
    if _matmul(_matmul(_transpose(rows), gram), rows) != gram:
        raise NotIsometry("matrix does not preserve the form")
    return Involution(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class EigenSplit:
    """Saturated integer bases of the (+1) and (-1) eigenlattices."""

    plus_basis: tuple[tuple[int, ...], ...]
    minus_basis: tuple[tuple[int, ...], ...]
    plus_sig: Signature
    minus_sig: Signature

    @property
    def rank(self) -> int:
        return len(self.plus_basis) + len(self.minus_basis)

    @cached_property
    def plus_array(self) -> np.ndarray:
        return np.array(self.plus_basis, dtype=float).reshape(len(self.plus_basis), self.rank)

    @cached_property
    def minus_array(self) -> np.ndarray:
        return np.array(self.minus_basis, dtype=float).reshape(len(self.minus_basis), self.rank)

    @cached_property
    def _coord_map(self) -> np.ndarray:
        basis = np.vstack([self.plus_array, self.minus_array])
        return np.linalg.inv(basis.T)

    def coords(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Eigen-coordinates of an ambient real vector, as (plus, minus)."""
        a = self._coord_map @ np.asarray(x, dtype=float)
        k = len(self.plus_basis)
        return a[:k], a[k:]

    def from_plus(self, a) -> np.ndarray:
        return self.plus_array.T @ np.asarray(a, dtype=float)

    def from_minus(self, a) -> np.ndarray:
        return self.minus_array.T @ np.asarray(a, dtype=float)

    def plus_part(self, x) -> np.ndarray:
        return self.from_plus(self.coords(x)[0])

    def minus_part(self, x) -> np.ndarray:
        return self.from_minus(self.coords(x)[1])

    @cached_property
    def index(self) -> int:
        """[L : L+ (+) L-], a power of two."""
        return abs(integer_det(list(self.plus_basis) + list(self.minus_basis)))

    @property
    def index_log2(self) -> int:
        return self.index.bit_length() - 1

    def to_dict(self) -> dict:
        return {
            "plus_basis": [list(v) for v in self.plus_basis],
            "minus_basis": [list(v) for v in self.minus_basis],
            "plus_sig": list(self.plus_sig),
            "minus_sig": list(self.minus_sig),
            "index_log2": self.index_log2,
        }


def _restricted_gram(lat: Lattice, basis) -> list[list[int]]:
    return [[lat.b_int(u, v) for v in basis] for u in basis]


def eigenlattices(lat: Lattice, c: Involution) -> EigenSplit:
    n = lat.rank
    plus = integer_kernel([[c.matrix[i][j] - (i == j) for j in range(n)] for i in range(n)])
    minus = integer_kernel([[c.matrix[i][j] + (i == j) for j in range(n)] for i in range(n)])
    return EigenSplit(
        plus_basis=tuple(plus),
        minus_basis=tuple(minus),
        plus_sig=exact_signature(_restricted_gram(lat, plus)) if plus else Signature(0, 0, 0),
        minus_sig=exact_signature(_restricted_gram(lat, minus)) if minus else Signature(0, 0, 0),
    )


class RealTypeReport(NamedTuple):
    is_rht: bool
    split: EigenSplit

    def to_dict(self) -> dict:
        return {
            "is_rht": self.is_rht,
            "plus_sig": list(self.split.plus_sig),
            "minus_sig": list(self.split.minus_sig),
            "index_log2": self.split.index_log2,
        }


def is_real_homological_type(lat: Lattice, c: Involution) -> RealTypeReport:
    split = eigenlattices(lat, c)
    return RealTypeReport(split.plus_sig.pos == 1, split)


def _entry_bound_is_complete(lat: Lattice, entry_bound: int) -> bool:
    """Whether every isometry provably has entries within the bound.

    Only decidable here for definite lattices: a column x of an isometry has
    q(x) = G_jj, and Cauchy-Schwarz gives x_i^2 <= G_jj * (G^-1)_ii.
    """
    sig = signature(lat)
    if sig.null or (sig.pos and sig.neg):
        return False
    g = lat.matrix if sig.pos else -lat.matrix
    ginv = np.linalg.inv(g)
    worst = max(abs(lat.gram[j][j]) for j in range(lat.rank)) * max(np.diag(ginv))
    return math.isqrt(int(math.floor(worst + 1e-9))) <= entry_bound


def enumerate_involutions(lat: Lattice, entry_bound: int = 1, cap: int = BOX_CAP,
                          warn: bool = True) -> list[Involution]:
    """All involutive isometries with entries in [-entry_bound, entry_bound].

    Column-by-column backtracking: column j must have q-norm ``G_jj`` and the
    prescribed products with the earlier columns.  Output is sorted by the
    row-major entry tuple.
    """
    try:
        box = integer_vectors_in_box(lat, entry_bound, cap=cap)
    except BoxTooLarge as exc:
        raise SearchSpaceTooLarge(str(exc)) from exc
    if warn and not _entry_bound_is_complete(lat, entry_bound):
        warnings.warn(
            f"involution list is complete only for entries bounded by {entry_bound}",
            EnumerationIncompleteWarning,
            stacklevel=2,
        )
    n = lat.rank
    g = np.array(lat.gram, dtype=np.int64)
    gbox = box @ g  # row k: (G x_k)^T
    norms = np.einsum("ij,ij->i", gbox, box)
    candidates = [np.flatnonzero(norms == lat.gram[j][j]) for j in range(n)]

    found: list[tuple[tuple[int, ...], ...]] = []
    cols: list[int] = []

    def extend(j: int):
        if j == n:
            m = box[cols].T
            if np.array_equal(m @ m, np.eye(n, dtype=np.int64)):
                found.append(tuple(tuple(int(x) for x in row) for row in m))
            return
        cand = candidates[j]
        for k, prev in enumerate(cols):
            cand = cand[gbox[cand] @ box[prev] == lat.gram[j][k]]
            if cand.size == 0:
                return
        for idx in cand:
            cols.append(int(idx))
            extend(j + 1)
            cols.pop()

    extend(0)
    return [Involution(m) for m in sorted(found)]


def brute_force_involutions(lat: Lattice, entry_bound: int = 1, cap: int = BOX_CAP) -> list[Involution]:
    """Plain scan over every matrix with bounded entries (reference for tiny ranks)."""
    n = lat.rank
    if (2 * entry_bound + 1) ** (n * n) > cap:
        raise SearchSpaceTooLarge("entry box too large for a plain scan")
    found = []
    for entries in itertools.product(range(-entry_bound, entry_bound + 1), repeat=n * n):
        m = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
        try:
            found.append(validate_involution(lat, m))
        except (NotInvolutive, NotIsometry):
            continue
    return sorted(found, key=lambda c: c.matrix)
