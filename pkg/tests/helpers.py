"""Random instance generators and the acceptance-criteria recorder."""

import math

import numpy as np

from hkreal.involution import eigenlattices, validate_involution
from hkreal.lattice_core import named_lattice, validate_lattice
from hkreal.period_domain import RealTriple

# criterion number -> (passed, detail)
CRITERIA: dict = {}


def record(number: int, passed: bool, detail: str) -> None:
    CRITERIA[number] = (bool(passed), detail)


def make_system(name: str):
    """(lattice, involution, split) for the two planner test lattices."""
    if name == "diag4":
        lat = named_lattice("diag(1,1,1,-1)")
        m = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    elif name == "uu1":
        # swap on the first U, -id on the second U and on <1>
        lat = named_lattice("U+U+diag(1)")
        m = [[0, 1, 0, 0, 0], [1, 0, 0, 0, 0], [0, 0, -1, 0, 0], [0, 0, 0, -1, 0],
             [0, 0, 0, 0, -1]]
    else:
        raise KeyError(name)
    c = validate_involution(lat, m)
    return lat, c, eigenlattices(lat, c)


def random_unimodular(rng, n: int, steps: int = 12) -> list:
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if i == j:
            t[0] = [-x for x in t[0]]
            continue
        k = int(rng.choice([-2, -1, 1, 2]))
        t[i] = [a + k * b for a, b in zip(t[i], t[j])]
    perm = rng.permutation(n)
    return [t[int(p)] for p in perm]


def congruent(gram, t):
    n = len(gram)
    tg = [[sum(t[k][i] * gram[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[sum(tg[i][k] * t[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def random_form(rng, pos: int, neg: int):
    """Random non-diagonal integral form congruent to diag(1^pos, (-1)^neg)."""
    n = pos + neg
    d = [[(1 if i < pos else -1) if i == j else 0 for j in range(n)] for i in range(n)]
    return validate_lattice(congruent(d, random_unimodular(rng, n, steps=2 * n)))


def random_positive(rng, lat, basis=None):
    """Random real vector with clearly positive q in span(basis) (ambient by default)."""
    basis = np.eye(lat.rank) if basis is None else np.asarray(basis, dtype=float)
    w, vecs = np.linalg.eigh(basis @ lat.matrix @ basis.T)
    if not np.any(w > 0):
        raise ValueError("span has no positive direction")
    x = rng.normal(size=len(w))
    pos, neg = w > 0, w < 0
    p = w[pos] @ x[pos] ** 2
    n = -w[neg] @ x[neg] ** 2
    if n > 0:
        # q = p - s^2 n with s^2 n <= 0.81 p
        x[neg] *= rng.uniform(0.0, 0.9) * np.sqrt(p / n)
    return x @ (vecs.T @ basis)


def random_triple(rng, lat, split, normalized=False) -> RealTriple:
    wp = random_positive(rng, lat, split.plus_array)
    wm = random_positive(rng, lat, split.minus_array)
    while True:
        g = random_positive(rng, lat, split.minus_array)
        g = g - lat.b(g, wm) / lat.q(wm) * wm
        if lat.q(g) > 0.05 * float(g @ g):
            break
    scale = 1.0 if normalized else float(rng.uniform(0.5, 3.0))
    wp = wp * scale / math.sqrt(lat.q(wp))
    wm = wm * scale / math.sqrt(lat.q(wm))
    return RealTriple(wp, wm, g * float(rng.uniform(0.5, 3.0)))


def random_target(rng, lat, split, bound: int = 3) -> tuple:
    """Random integer class of L- with q > 0."""
    basis = np.array(split.minus_basis, dtype=np.int64)
    while True:
        coeffs = rng.integers(-bound, bound + 1, size=len(basis))
        l = tuple(int(x) for x in coeffs @ basis)
        if lat.b_int(l, l) > 0:
            return l
