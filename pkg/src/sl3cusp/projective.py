"""Arithmetic mod p and canonical enumeration of P^1(Z/pZ) and P^2(Z/pZ).

Points are kept in a canonical form where the first nonzero coordinate
(in reading order) equals 1.  Each point carries a dense integer index:

  P^2: points (1:y:z) come first, ordered by (y, z), with index y*p + z;
       then (0:1:z) with index p^2 + z; finally (0:0:1) with index p^2 + p.
  P^1: (1:y) with index y, then (0:1) with index p.

This layout keeps the z-summation rows of the cuspidal relation system
contiguous.  All objects here are immutable after construction.
"""

import numpy as np


class AllZeroError(ValueError):
    """Raised when a projective point is built from the zero vector."""


def is_prime(n):
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeLevel:
    """A validated prime level p, with precomputed inverses mod p."""

    def __init__(self, p):
        p = int(p)
        if not is_prime(p):
            raise ValueError(f"level must be prime, got {p}")
        self.p = p
        inv = np.zeros(p, dtype=np.int64)
        inv[1:] = [pow(a, p - 2, p) for a in range(1, p)]
        self.inv = inv  # inv[0] unused sentinel 0

    @property
    def n_p2(self):
        return self.p * self.p + self.p + 1

    @property
    def n_p1(self):
        return self.p + 1

    def __repr__(self):
        return f"PrimeLevel({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeLevel) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeLevel", self.p))


class P2Point:
    """Canonical point of P^2(Z/pZ) with its dense index."""

    __slots__ = ("coords", "index")

    def __init__(self, coords, index):
        self.coords = coords
        self.index = index

    def __repr__(self):
        x, y, z = self.coords
        return f"({x}:{y}:{z})"

    def __eq__(self, other):
        return isinstance(other, P2Point) and other.coords == self.coords

    def __hash__(self):
        return hash(self.coords)


class P1Point:
    """Canonical point of P^1(Z/pZ) with its dense index."""

    __slots__ = ("coords", "index")

    def __init__(self, coords, index):
        self.coords = coords
        self.index = index

    def __repr__(self):
        x, y = self.coords
        return f"({x}:{y})"

    def __eq__(self, other):
        return isinstance(other, P1Point) and other.coords == self.coords

    def __hash__(self):
        return hash(self.coords)


def p2_index(x, y, z, level):
    """Dense index of the projective class of (x, y, z); scale-invariant."""
    p = level.p
    x %= p
    y %= p
    z %= p
    if x != 0:
        ix = int(level.inv[x])
        return (y * ix % p) * p + (z * ix % p)
    if y != 0:
        iy = int(level.inv[y])
        return p * p + (z * iy % p)
    if z != 0:
        return p * p + p
    raise AllZeroError(f"(0,0,0) is not a point of P^2(Z/{p}Z)")


def p2_point_from_index(idx, level):
    p = level.p
    if idx < p * p:
        return P2Point((1, idx // p, idx % p), idx)
    if idx < p * p + p:
        return P2Point((0, 1, idx - p * p), idx)
    if idx == p * p + p:
        return P2Point((0, 0, 1), idx)
    raise IndexError(f"index {idx} out of range for P^2(Z/{p}Z)")


def canon_p2(x, y, z, level):
    """Canonical representative of (x : y : z), first nonzero coordinate 1."""
    return p2_point_from_index(p2_index(x, y, z, level), level)


def enumerate_p2(level):
    """All p^2 + p + 1 points of P^2(Z/pZ), in index order."""
    return [p2_point_from_index(i, level) for i in range(level.n_p2)]


def p1_index(x, y, level):
    p = level.p
    x %= p
    y %= p
    if x != 0:
        return y * int(level.inv[x]) % p
    if y != 0:
        return p
    raise AllZeroError(f"(0,0) is not a point of P^1(Z/{p}Z)")


def p1_point_from_index(idx, level):
    p = level.p
    if idx < p:
        return P1Point((1, idx), idx)
    if idx == p:
        return P1Point((0, 1), idx)
    raise IndexError(f"index {idx} out of range for P^1(Z/{p}Z)")


def canon_p1(x, y, level):
    """Canonical representative of (x : y)."""
    return p1_point_from_index(p1_index(x, y, level), level)


def enumerate_p1(level):
    return [p1_point_from_index(i, level) for i in range(level.n_p1)]


def first_column_point(M, level):
    """The first column of a 3x3 integer matrix as a point of P^2(Z/pZ).

    Raises AllZeroError when the column vanishes mod p; this cannot happen
    for a matrix whose first column is unimodular (content 1).
    """
    return canon_p2(M[0][0], M[1][0], M[2][0], level)


def p2_coordinate_arrays(level):
    """Coordinates of all P^2 points as three int64 arrays (index order)."""
    p = level.p
    N = level.n_p2
    X = np.empty(N, dtype=np.int64)
    Y = np.empty(N, dtype=np.int64)
    Z = np.empty(N, dtype=np.int64)
    yz = np.arange(p * p)
    X[: p * p] = 1
    Y[: p * p] = yz // p
    Z[: p * p] = yz % p
    X[p * p : p * p + p] = 0
    Y[p * p : p * p + p] = 1
    Z[p * p : p * p + p] = np.arange(p)
    X[N - 1] = 0
    Y[N - 1] = 0
    Z[N - 1] = 1
    return X, Y, Z


def p2_index_array(x, y, z, level):
    """Vectorized p2_index for int64 coordinate arrays (no zero triples)."""
    p = level.p
    x = x % p
    y = y % p
    z = z % p
    idx = np.empty(x.shape, dtype=np.int64)
    c1 = x != 0
    c2 = (~c1) & (y != 0)
    c3 = (~c1) & (~c2)
    ix = level.inv[x[c1]]
    idx[c1] = (y[c1] * ix % p) * p + (z[c1] * ix % p)
    iy = level.inv[y[c2]]
    idx[c2] = p * p + (z[c2] * iy % p)
    idx[c3] = p * p + p
    return idx


def p1_coordinate_arrays(level):
    p = level.p
    X = np.concatenate([np.ones(p, dtype=np.int64), [0]])
    Y = np.concatenate([np.arange(p, dtype=np.int64), [1]])
    return X, Y


def p1_index_array(x, y, level):
    p = level.p
    x = x % p
    y = y % p
    idx = np.empty(x.shape, dtype=np.int64)
    c1 = x != 0
    idx[c1] = y[c1] * level.inv[x[c1]] % p
    idx[~c1] = p
    return idx
