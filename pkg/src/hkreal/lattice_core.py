"""Integral lattices: exact invariants and real-subspace helpers.

A lattice is stored as its integer Gram matrix ``G``; the bilinear form is
``b(x, y) = x^T G y`` and ``q(x) = b(x, x)``.  Anything computed from the
integer Gram (signature, kernels, determinants, primitivity) uses Python
integers and :class:`fractions.Fraction`; real subspaces and real vectors
use numpy floats.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import null_space, orth

from .errors import BoxTooLarge, DegenerateSpan, InputError, NotSquare, NotSymmetric

DEFAULT_TOL = 1e-9
BOX_CAP = 10**7


class Signature(NamedTuple):
    pos: int
    neg: int
    null: int


@dataclass(frozen=True)
class Lattice:
    gram: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.array(self.gram, dtype=float).reshape(self.rank, self.rank)
        m.setflags(write=False)
        return m

    def b(self, x, y) -> float:
        return float(np.asarray(x, dtype=float) @ self.matrix @ np.asarray(y, dtype=float))

    def q(self, x) -> float:
        return self.b(x, x)

    def b_int(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Exact bilinear form on integer vectors."""
        return sum(x[i] * self.gram[i][j] * y[j]
                   for i in range(self.rank) for j in range(self.rank))

    def to_dict(self) -> dict:
        return {"rank": self.rank, "gram": [list(row) for row in self.gram]}

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        lat = validate_lattice(data["gram"])
        if "rank" in data and data["rank"] != lat.rank:
            raise NotSquare(f"declared rank {data['rank']} but gram has size {lat.rank}")
        return lat


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Real subspace of L (x) R given by independent row vectors."""

    vectors: np.ndarray = field()

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if vecs.size == 0:
            vecs = vecs.reshape(0, vecs.shape[-1] if vecs.ndim == 2 else 0)
        elif vecs.shape[0]:
            gram_det = np.linalg.det(vecs @ vecs.T)
            if not gram_det > DEFAULT_TOL:
                raise DegenerateSpan("subspace basis vectors are linearly dependent")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.dim

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            return bool(np.max(np.abs(x), initial=0.0) <= tol)
        coeffs, *_ = np.linalg.lstsq(self.vectors.T, x, rcond=None)
        return bool(np.max(np.abs(self.vectors.T @ coeffs - x)) <= tol)


def validate_lattice(gram) -> Lattice:
    rows = [list(r) for r in gram]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise NotSquare("gram matrix must be square and nonempty")
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, bool) or int(x) != x:
                raise InputError(f"gram entries must be integers, got {x!r}")
            row.append(int(x))
        out.append(tuple(row))
    for i in range(n):
        for j in range(i + 1, n):
            if out[i][j] != out[j][i]:
                raise NotSymmetric(f"gram[{i}][{j}]={out[i][j]} but gram[{j}][{i}]={out[j][i]}")
    return Lattice(tuple(out))


def exact_signature(matrix) -> Signature:
    """Inertia of a symmetric rational matrix by congruence diagonalization."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        pivot = next((i for i in active if a[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes the diagonal entry 2*a[i][j]
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            pivot = i
        d = a[pivot][pivot]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(pivot)
        for r in active:
            f = a[r][pivot] / d
            if f:
                for k in active:
                    a[r][k] -= f * a[pivot][k]
        for r in active:
            a[r][pivot] = a[pivot][r] = Fraction(0)
    return Signature(pos, neg, n - pos - neg)


def signature(lat: Lattice) -> Signature:
    return exact_signature(lat.gram)


def is_primitive_form(lat: Lattice, convention: str = "bilinear") -> bool:
    """True if the form is not an integer multiple of another integral form.

    ``convention="bilinear"`` takes the gcd of all Gram entries (so even
    unimodular lattices such as U and the K3 lattice are primitive).
    ``convention="polynomial"`` takes the gcd of the coefficients of the
    integer polynomial ``x^T G x``, i.e. of ``G_ii`` and ``2 G_ij``.
    """
    n = lat.rank
    if convention == "bilinear":
        coeffs = [lat.gram[i][j] for i in range(n) for j in range(i, n)]
    elif convention == "polynomial":
        coeffs = [lat.gram[i][i] for i in range(n)]
        coeffs += [2 * lat.gram[i][j] for i in range(n) for j in range(i + 1, n)]
    else:
        raise ValueError(f"unknown primitivity convention {convention!r}")
    return reduce(math.gcd, coeffs, 0) == 1


def gram_of_span(lat: Lattice, vecs) -> np.ndarray:
    v = np.atleast_2d(np.asarray(vecs, dtype=float))
    return v @ lat.matrix @ v.T


def orthogonal_complement(lat: Lattice, vecs, tol: float = DEFAULT_TOL,
                          within: SubspaceBasis | None = None) -> SubspaceBasis:
    """Basis of the b-orthogonal complement of span(vecs).

    With ``within`` the complement is taken inside that subspace.  Raises
    :class:`DegenerateSpan` if b restricted to span(vecs) is singular.
    """
    v = np.atleast_2d(np.asarray(vecs, dtype=float))
    ambient = np.eye(lat.rank) if within is None else within.vectors
    if v.size == 0:
        return SubspaceBasis(ambient.copy())
    frame = orth(v.T)
    restricted = frame.T @ lat.matrix @ frame
    if np.min(np.abs(np.linalg.eigvalsh(restricted))) <= tol:
        raise DegenerateSpan("form restricted to the span is degenerate")
    coeffs = null_space(frame.T @ lat.matrix @ ambient.T, rcond=tol)
    return SubspaceBasis((ambient.T @ coeffs).T)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def positive_vector(lat: Lattice, sub: SubspaceBasis, tol: float = DEFAULT_TOL):
    """A vector of the subspace with q = 1, or None if q <= 0 on it."""
    if sub.dim == 0:
        return None
    frame = orth(sub.vectors.T)
    evals, evecs = np.linalg.eigh(frame.T @ lat.matrix @ frame)
    if evals[-1] <= tol:
        return None
    v = frame @ evecs[:, -1]
    return _canonical_sign(v / math.sqrt(lat.q(v)))


@lru_cache(maxsize=16)
def _box(rank: int, bound: int) -> np.ndarray:
    axis = np.arange(-bound, bound + 1)
    grid = np.stack(np.meshgrid(*([axis] * rank), indexing="ij"), axis=-1).reshape(-1, rank)
    # drop the zero vector, which sits exactly in the middle of the lex order
    out = np.delete(grid, grid.shape[0] // 2, axis=0)
    out.setflags(write=False)
    return out


def integer_vectors_in_box(lat: Lattice, coeff_bound: int, cap: int = BOX_CAP) -> np.ndarray:
    """Nonzero integer vectors with coordinates in [-bound, bound], lex order."""
    if coeff_bound < 0:
        raise InputError("coeff_bound must be nonnegative")
    size = (2 * coeff_bound + 1) ** lat.rank
    if size > cap:
        raise BoxTooLarge(f"box has {size} points, cap is {cap}")
    if coeff_bound == 0:
        return np.zeros((0, lat.rank), dtype=np.int64)
    return _box(lat.rank, coeff_bound)


# --- exact integer linear algebra -------------------------------------------

def integer_det(matrix) -> int:
    """Determinant of an integer matrix (Bareiss fraction-free elimination)."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _row_echelon(rows: list[list[int]], ncols: int) -> int:
    """In-place integer row reduction of the first ``ncols`` columns.

    Leaves rows in Hermite form on those columns (positive pivots, entries
    above each pivot reduced into [0, pivot)) and returns the number of
    pivot rows.  Extra trailing columns are carried along, which is how
    the unimodular transform is tracked.
    """
    r = 0
    nrows = len(rows)
    for col in range(ncols):
        while True:
            nz = [i for i in range(r, nrows) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, nrows):
                f = rows[i][col] // rows[r][col]
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                if rows[i][col]:
                    done = False
            if done:
                break
        if r < nrows and rows[r][col] != 0:
            if rows[r][col] < 0:
                rows[r] = [-x for x in rows[r]]
            for i in range(r):
                f = rows[i][col] // rows[r][col]
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            r += 1
            if r == nrows:
                break
    return r


def hermite_normal_form(rows) -> list[tuple[int, ...]]:
    """Row-style HNF of the lattice generated by integer rows (zero rows dropped)."""
    work = [list(map(int, row)) for row in rows]
    if not work:
        return []
    r = _row_echelon(work, len(work[0]))
    return [tuple(row) for row in work[:r]]


def integer_kernel(matrix) -> list[tuple[int, ...]]:
    """HNF basis of {x in Z^n : A x = 0}; saturated by construction."""
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if a else 0
    # rows of [A^T | I]; reducing the A^T part tracks a unimodular transform
    aug = [[a[i][j] for i in range(m)] + [int(j == k) for k in range(n)] for j in range(n)]
    r = _row_echelon(aug, m)
    kernel = [row[m:] for row in aug[r:]]
    return hermite_normal_form(kernel)


# --- named lattices ---------------------------------------------------------

_E8_EDGES = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]


def hyperbolic_plane() -> Lattice:
    return Lattice(((0, 1), (1, 0)))


def e8(scale: int = 1) -> Lattice:
    g = [[2 * scale if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in _E8_EDGES:
        g[i][j] = g[j][i] = -scale
    return validate_lattice(g)


def diagonal(*entries: int) -> Lattice:
    n = len(entries)
    return validate_lattice([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def direct_sum(*lats: Lattice) -> Lattice:
    n = sum(l.rank for l in lats)
    g = [[0] * n for _ in range(n)]
    off = 0
    for lat in lats:
        for i, j in itertools.product(range(lat.rank), repeat=2):
            g[off + i][off + j] = lat.gram[i][j]
        off += lat.rank
    return validate_lattice(g)


def k3_lattice() -> Lattice:
    u = hyperbolic_plane()
    return direct_sum(u, u, u, e8(-1), e8(-1))


_DIAG_RE = re.compile(r"^diag\(\s*([-+]?\d+(?:\s*,\s*[-+]?\d+)*)\s*\)$")


def named_lattice(name: str) -> Lattice:
    """Built-in lattice by name.

    Recognized: ``U``, ``E8``, ``E8(-1)``, ``K3``, ``diag(a,b,...)`` and
    direct sums of those joined by ``+`` (e.g. ``U+U+diag(1)``).
    """
    parts = _split_sum(name)
    if len(parts) > 1:
        return direct_sum(*(named_lattice(p) for p in parts))
    key = name.strip()
    if key == "U":
        return hyperbolic_plane()
    if key == "E8":
        return e8()
    if key == "E8(-1)":
        return e8(-1)
    if key == "K3":
        return k3_lattice()
    m = _DIAG_RE.match(key)
    if m:
        return diagonal(*(int(x) for x in m.group(1).split(",")))
    raise InputError(f"unknown lattice name {name!r}")


def _split_sum(name: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in name.replace("⊕", "+"):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in parts if p.strip()]
