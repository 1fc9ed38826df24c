"""The spaces W, W0, U as kernels of relation systems over F_q.

W is the space of functions on P^2(Z/pZ) satisfying

  (i)  f(x:y:z) = f(z:x:y) = f(-x:y:z) = -f(y:x:z)
  (ii) f(x:y:z) + f(-y:x-y:z) + f(y-x:-x:z) = 0

and U is the subspace cut out additionally by

  (iii) f(x:y:0) = 0
  (iv)  sum_z f(x:y:z) = 0 for every (x:y).

W0 is the analogous space on P^1(Z/pZ): f(x:y) = f(-x:y) = -f(y:x),
the three-term relation f(x:y) + f(-y:x-y) + f(y-x:-x) = 0, and
f(1:0) = 0.

Condition (i) generates an action of the 48-element group of signed
coordinate permutations with character the permutation sign.  Rather
than emitting (i) as matrix rows, we quotient by it: each orbit gets one
variable attached to its minimal-index representative, orbits whose
stabilizer meets the character nontrivially are forced to zero, and all
remaining relations are rewritten in orbit variables.  This shrinks the
elimination problem by roughly the group order.

The sum in condition (iv) is emitted once per class (x:y) of P^1; the
degenerate pair (0,0) is excluded since f(0:0:1) = 0 already follows
from (i) and (iii).
"""

import itertools

import numpy as np

from . import exactla
from .projective import (
    p1_coordinate_arrays,
    p1_index_array,
    p2_coordinate_arrays,
    p2_index_array,
)


class WFunction:
    """Element of W (or U): a dense F_q-valued table indexed by P^2 index."""

    def __init__(self, values, level, q):
        self.values = np.asarray(values, dtype=np.int64) % q
        if len(self.values) != level.n_p2:
            raise ValueError("value table has wrong length for this level")
        self.level = level
        self.q = q

    def __call__(self, x, y, z):
        from .projective import p2_index

        return int(self.values[p2_index(x, y, z, self.level)])


class W0Function:
    """Element of W0(Delta(p)): dense table indexed by P^1 index."""

    def __init__(self, values, level, q):
        self.values = np.asarray(values, dtype=np.int64) % q
        if len(self.values) != level.n_p1:
            raise ValueError("value table has wrong length for this level")
        self.level = level
        self.q = q

    def __call__(self, x, y):
        from .projective import p1_index

        return int(self.values[p1_index(x, y, self.level)])


class OrbitData:
    """Orbit structure of a signed-permutation action with a character.

    rep[i]  -- minimal point index in the orbit of i
    sign[i] -- chi of some group element carrying rep[i] to i
    zero[i] -- True when the orbit is forced to vanish (stabilizer with
               chi = -1, or an imposed pointwise-zero condition)
    var_of[i] -- dense variable number of rep i, or -1
    """

    def __init__(self, rep, sign, zero):
        self.rep = rep
        self.sign = sign
        self.zero = zero
        n = len(rep)
        alive = np.unique(rep[~zero])
        self.var_of = -np.ones(n, dtype=np.int64)
        self.var_of[alive] = np.arange(len(alive))
        self.reps_alive = alive
        self.nvar = len(alive)

    def expand(self, coeffs, q):
        """Full point table from a vector of orbit-variable values."""
        vals = np.zeros(len(self.rep), dtype=np.int64)
        live = ~self.zero
        vals[live] = (
            self.sign[live] * coeffs[self.var_of[self.rep[live]]]
        ) % q
        return vals


def _orbits_from_images(imgs, chis, extra_zero=None):
    rep = imgs.min(axis=0)
    hit = imgs == rep[None, :]
    plus = (hit & (chis[:, None] == 1)).any(axis=0)
    minus = (hit & (chis[:, None] == -1)).any(axis=0)
    zero_pt = plus & minus
    if extra_zero is not None:
        zero_pt = zero_pt | extra_zero
    sign = np.where(plus, 1, -1)
    n = len(rep)
    zero_rep = np.zeros(n, dtype=bool)
    np.logical_or.at(zero_rep, rep, zero_pt)
    return OrbitData(rep, sign, zero_rep[rep])


def p2_orbits(level, kill_boundary=False):
    """Orbits of P^2 under condition (i); optionally impose (iii) + cyclic."""
    p = level.p
    X, Y, Z = p2_coordinate_arrays(level)
    coords = (X, Y, Z)
    perms = list(itertools.permutations((0, 1, 2)))
    even = {(0, 1, 2), (1, 2, 0), (2, 0, 1)}
    imgs, chis = [], []
    for pm in perms:
        for s0 in (1, p - 1):
            for s1 in (1, p - 1):
                for s2 in (1, p - 1):
                    imgs.append(
                        p2_index_array(
                            coords[pm[0]] * s0,
                            coords[pm[1]] * s1,
                            coords[pm[2]] * s2,
                            level,
                        )
                    )
                    chis.append(1 if pm in even else -1)
    imgs = np.stack(imgs)
    chis = np.array(chis)
    extra = None
    if kill_boundary:
        extra = (X == 0) | (Y == 0) | (Z == 0)
    return _orbits_from_images(imgs, chis, extra_zero=extra)


def p1_orbits(level, kill_infinity=False):
    """Orbits of P^1 under f(x:y) = f(-x:y) = -f(y:x)."""
    p = level.p
    X, Y = p1_coordinate_arrays(level)
    imgs, chis = [], []
    for swap in (False, True):
        a, b = (Y, X) if swap else (X, Y)
        for s0 in (1, p - 1):
            for s1 in (1, p - 1):
                imgs.append(p1_index_array(a * s0, b * s1, level))
                chis.append(-1 if swap else 1)
    imgs = np.stack(imgs)
    chis = np.array(chis)
    extra = None
    if kill_infinity:
        extra = (Y % p == 0) & (X % p != 0)  # the point (1:0)
    return _orbits_from_images(imgs, chis, extra_zero=extra)


class RelationSystem:
    """A sparse relation matrix in orbit variables whose kernel is a space.

    kind is one of "W", "W0", "U".  Kernel vectors of `matrix` live in
    orbit coordinates; expand() turns one into a full point table, and
    kernel_functions() returns them wrapped as WFunction / W0Function.
    """

    def __init__(self, matrix, kind, level, q, orbits):
        self.matrix = matrix
        self.kind = kind
        self.level = level
        self.q = q
        self.orbits = orbits

    def nullity(self, method="auto", seed=0):
        return len(self.kernel_vectors(method=method, seed=seed))

    def kernel_vectors(self, method="auto", seed=0):
        return exactla.kernel_basis(self.matrix, method=method, seed=seed)

    def expand(self, vec):
        return self.orbits.expand(np.asarray(vec, dtype=np.int64), self.q)

    def kernel_functions(self, method="auto", seed=0):
        cls = W0Function if self.kind == "W0" else WFunction
        return [
            cls(self.expand(v), self.level, self.q)
            for v in self.kernel_vectors(method=method, seed=seed)
        ]


def _normalize_row(d):
    items = tuple(sorted((k, c) for k, c in d.items() if c))
    if not items:
        return None
    if items[0][1] < 0:
        items = tuple((k, -c) for k, c in items)
    return items


def _three_term_rows_p2(level, orbits):
    """Rows of condition (ii), one per P^2 point, deduplicated."""
    X, Y, Z = p2_coordinate_arrays(level)
    triples = [(X, Y, Z), (-Y, X - Y, Z), (Y - X, -X, Z)]
    vs, ss = [], []
    for (a, b, c) in triples:
        idx = p2_index_array(a, b, c, level)
        vs.append(orbits.var_of[orbits.rep[idx]])
        ss.append(np.where(orbits.zero[idx], 0, orbits.sign[idx]))
    rows = set()
    for i in range(level.n_p2):
        d = {}
        for v, s in zip(vs, ss):
            if s[i]:
                d[int(v[i])] = d.get(int(v[i]), 0) + int(s[i])
        row = _normalize_row(d)
        if row:
            rows.add(row)
    return sorted(rows)


def _zsum_rows(level, orbits):
    """Rows of condition (iv): one per P^1 class (x:y), deduplicated."""
    p = level.p
    X1, Y1 = p1_coordinate_arrays(level)
    rows = set()
    zs = np.arange(p, dtype=np.int64)
    for k in range(level.n_p1):
        x, y = int(X1[k]), int(Y1[k])
        idx = p2_index_array(
            np.full(p, x, dtype=np.int64), np.full(p, y, dtype=np.int64), zs, level
        )
        v = orbits.var_of[orbits.rep[idx]]
        s = np.where(orbits.zero[idx], 0, orbits.sign[idx])
        d = {}
        for vi, si in zip(v, s):
            if si:
                d[int(vi)] = d.get(int(vi), 0) + int(si)
        row = _normalize_row(d)
        if row:
            rows.add(row)
    return sorted(rows)


def build_W_system(level, q):
    """Relation system whose kernel is W: conditions (i)-(ii)."""
    orbits = p2_orbits(level, kill_boundary=False)
    rows = _three_term_rows_p2(level, orbits)
    M = exactla.SparseMatrixFq(rows, orbits.nvar, q)
    return RelationSystem(M, "W", level, q, orbits)


def build_U_system(level, q):
    """Relation system whose kernel is U: conditions (i)-(iv).

    Conditions (iii) and the cyclic part of (i) force every point with a
    zero coordinate to vanish, which is folded into the orbit structure;
    the matrix carries the three-term rows and the z-sum rows.
    """
    orbits = p2_orbits(level, kill_boundary=True)
    rows = _three_term_rows_p2(level, orbits) + _zsum_rows(level, orbits)
    M = exactla.SparseMatrixFq(rows, orbits.nvar, q)
    return RelationSystem(M, "U", level, q, orbits)


def build_W0_system(level, q):
    """Relation system whose kernel is W0(Delta(p))."""
    p = level.p
    orbits = p1_orbits(level, kill_infinity=True)
    X, Y = p1_coordinate_arrays(level)
    pairs = [(X, Y), (-Y, X - Y), (Y - X, -X)]
    vs, ss = [], []
    for (a, b) in pairs:
        idx = p1_index_array(a % p, b % p, level)
        vs.append(orbits.var_of[orbits.rep[idx]])
        ss.append(np.where(orbits.zero[idx], 0, orbits.sign[idx]))
    rows = set()
    for i in range(level.n_p1):
        d = {}
        for v, s in zip(vs, ss):
            if s[i]:
                d[int(v[i])] = d.get(int(v[i]), 0) + int(s[i])
        row = _normalize_row(d)
        if row:
            rows.add(row)
    M = exactla.SparseMatrixFq(sorted(rows), orbits.nvar, q)
    return RelationSystem(M, "W0", level, q, orbits)


# ---------------------------------------------------------------------------
# the linear maps alpha, beta, A, B, C, D


def _p1_lookup(f, a, b):
    """f(a:b) with the f(0:0) = 0 convention, vectorized."""
    p = f.level.p
    a = a % p
    b = b % p
    out = np.zeros(a.shape, dtype=np.int64)
    ok = (a != 0) | (b != 0)
    out[ok] = f.values[p1_index_array(a[ok], b[ok], f.level)]
    return out


def apply_alpha(f):
    """(alpha f)(x:y:z) = f(x:y) + f(y:z) + f(z:x)."""
    X, Y, Z = p2_coordinate_arrays(f.level)
    vals = (_p1_lookup(f, X, Y) + _p1_lookup(f, Y, Z) + _p1_lookup(f, Z, X)) % f.q
    return WFunction(vals, f.level, f.q)


def apply_beta(f):
    """(beta f): supported on xyz = 0, one P^1 value per branch."""
    p = f.level.p
    X, Y, Z = p2_coordinate_arrays(f.level)
    vals = np.zeros(f.level.n_p2, dtype=np.int64)
    mz = (Z % p == 0) & ((X % p != 0) | (Y % p != 0))
    vals[mz] = _p1_lookup(f, X[mz], Y[mz])
    mx = (X % p == 0) & ~mz & ((Y % p != 0) | (Z % p != 0))
    vals[mx] = _p1_lookup(f, Y[mx], Z[mx])
    my = (Y % p == 0) & ~mz & ~mx
    vals[my] = _p1_lookup(f, Z[my], X[my])
    return WFunction(vals % f.q, f.level, f.q)


def apply_A(g):
    """(A g)(x:y) = sum over z in (Z/pZ)* of g(x:y:z)."""
    p = g.level.p
    X1, Y1 = p1_coordinate_arrays(g.level)
    vals = np.zeros(g.level.n_p1, dtype=np.int64)
    zs = np.arange(1, p, dtype=np.int64)
    for k in range(g.level.n_p1):
        idx = p2_index_array(
            np.full(p - 1, X1[k]), np.full(p - 1, Y1[k]), zs, g.level
        )
        vals[k] = int(g.values[idx].sum() % g.q)
    return W0Function(vals, g.level, g.q)


def apply_B(g):
    """(B g)(x:y) = g(x:y:0)."""
    X1, Y1 = p1_coordinate_arrays(g.level)
    idx = p2_index_array(X1, Y1, np.zeros(g.level.n_p1, dtype=np.int64), g.level)
    return W0Function(g.values[idx], g.level, g.q)


def apply_C(f):
    """(C f)(x:y) = (p-1)^-1 sum over lambda of f(1 : lambda x : lambda y).

    Well-defined on the annihilator of the R-operators; requires
    q coprime to p - 1.
    """
    p, q = f.level.p, f.q
    if (p - 1) % q == 0:
        raise ValueError(f"C undefined: q={q} divides p-1={p - 1}")
    inv = pow(p - 1, q - 2, q)
    X1, Y1 = p1_coordinate_arrays(f.level)
    lam = np.arange(1, p, dtype=np.int64)
    vals = np.zeros(f.level.n_p1, dtype=np.int64)
    ones = np.ones(p - 1, dtype=np.int64)
    for k in range(f.level.n_p1):
        idx = p2_index_array(ones, lam * int(X1[k]), lam * int(Y1[k]), f.level)
        vals[k] = int(f.values[idx].sum()) * inv % q
    return W0Function(vals, f.level, f.q)


def apply_D(f):
    """(D f) = -(C f) + (B f)."""
    c = apply_C(f)
    b = apply_B(f)
    return W0Function((b.values - c.values) % f.q, f.level, f.q)


# ---------------------------------------------------------------------------
# membership tests (exhaustive scans of the defining relations)


def is_in_W(f):
    p, q = f.level.p, f.q
    X, Y, Z = p2_coordinate_arrays(f.level)
    v = f.values

    def at(a, b, c):
        return v[p2_index_array(a % p, b % p, c % p, f.level)]

    if np.any((at(Z, X, Y) - v) % q):
        return False
    if np.any((at(-X, Y, Z) - v) % q):
        return False
    if np.any((at(Y, X, Z) + v) % q):
        return False
    if np.any((v + at(-Y, X - Y, Z) + at(Y - X, -X, Z)) % q):
        return False
    return True


def is_in_U(f):
    if not is_in_W(f):
        return False
    p, q = f.level.p, f.q
    X, Y, Z = p2_coordinate_arrays(f.level)
    boundary = (X % p == 0) | (Y % p == 0) | (Z % p == 0)
    if np.any(f.values[boundary] % q):
        return False
    X1, Y1 = p1_coordinate_arrays(f.level)
    zs = np.arange(p, dtype=np.int64)
    for k in range(f.level.n_p1):
        idx = p2_index_array(
            np.full(p, X1[k]), np.full(p, Y1[k]), zs, f.level
        )
        if int(f.values[idx].sum()) % q:
            return False
    return True


def is_in_W0(f):
    p, q = f.level.p, f.q
    X, Y = p1_coordinate_arrays(f.level)
    v = f.values

    def at(a, b):
        return v[p1_index_array(a % p, b % p, f.level)]

    if np.any((at(-X, Y) - v) % q):
        return False
    if np.any((at(Y, X) + v) % q):
        return False
    if np.any((v + at(-Y, X - Y) + at(Y - X, -X)) % q):
        return False
    if int(at(np.array([1]), np.array([0]))[0]) % q:
        return False
    return True
