"""Hecke operators E_l and F_l acting directly on the cuspidal space U.

The double coset Gamma A Gamma splits into l^2 + l + 1 left cosets
B_i Gamma.  For E_l (elementary divisors (1,1,l)) the column lattice of
B_i is an index-l sublattice of Z^3, i.e. {v : u.v = 0 mod l} for a
point u of P^2(Z/lZ); for F_l (divisors (1,l,l)) it is l Z^3 + Z t for
t in P^2(Z/lZ).  We enumerate one matrix per lattice and then right-
multiply by an SL(3,Z) element so the first column is congruent to
(*,0,0) mod p, which places the representative inside Gamma A Gamma
without changing its left coset.  Distinctness of the cosets, the count,
and the determinants are checked eagerly on construction.

The adjoint operator is computed through the annihilator operators

    R_{x,y,z} = [Q_{x,y}] + [Q_{y,z}] + [Q_{z,x}] - [Q_{y/x, z/x}]

(xyz != 0 mod p), which span the annihilator of the non-cuspidal part,
so no non-cuspidal eigenvalues are picked up.  For a pair of R's whose
plain pairing matrix P against the U-basis is invertible, the matrix of
the adjoint Hecke action is P^{-1} H with H the Hecke-translated
pairing matrix.
"""

from functools import lru_cache

import numpy as np

from . import modsym
from .exactla import charpoly_2x2
from .projective import is_prime, p2_index


class BadPrimeError(ValueError):
    """Hecke prime l coincides with the level p."""


class ZeroCoordinateError(ValueError):
    """R_{x,y,z} requires xyz != 0 mod p."""


class ExhaustedError(RuntimeError):
    """No invertible pairing pair of R operators was found."""


class HeckeKind:
    """An operator label: kind 'E' or 'F' at a prime l, at level p."""

    def __init__(self, kind, ell, level):
        if kind not in ("E", "F"):
            raise ValueError(f"kind must be 'E' or 'F', got {kind!r}")
        if not is_prime(ell):
            raise ValueError(f"l must be prime, got {ell}")
        if ell == level.p:
            raise BadPrimeError(f"l = p = {ell} is a bad prime")
        self.kind = kind
        self.ell = ell
        self.level = level

    def __repr__(self):
        return f"{self.kind}_{self.ell}@p={self.level.p}"


# ---------------------------------------------------------------------------
# coset representatives


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def _complete_to_sl3(c):
    """A matrix in SL(3,Z) whose first column is the primitive vector c."""
    v = list(c)
    U = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for (i, j) in ((1, 2), (0, 1)):
        a, b = v[i], v[j]
        if b == 0:
            continue
        g, x, y = _egcd(a, b)
        ri = [x * U[i][t] + y * U[j][t] for t in range(3)]
        rj = [(-b // g) * U[i][t] + (a // g) * U[j][t] for t in range(3)]
        U[i], U[j] = ri, rj
        v[i], v[j] = g, 0
    if v[0] == -1:
        U[0] = [-t for t in U[0]]
        U[1] = [-t for t in U[1]]
        v[0] = 1
    if v != [1, 0, 0] or modsym.det3(U) != 1:
        raise ArithmeticError(f"column completion failed for {c}")
    return modsym.adjugate(U)  # U^{-1}, det 1, first column c


def _fix_first_column(B, p):
    """B @ gamma with gamma in SL(3,Z) and first column = (*,0,0) mod p."""
    Bm = [[x % p for x in r] for r in B]
    d = modsym.det3(Bm) % p
    adj = modsym.adjugate(Bm)
    dinv = pow(d, p - 2, p)
    c = [adj[i][0] * dinv % p for i in range(3)]
    cc = [x if x <= p // 2 else x - p for x in c]
    from math import gcd

    g = gcd(gcd(abs(cc[0]), abs(cc[1])), abs(cc[2]))
    if g == 0:
        raise ArithmeticError("degenerate column mod p")
    if g > 1:
        for i in range(3):
            t = cc[:]
            t[i] += p
            if gcd(gcd(abs(t[0]), abs(t[1])), abs(t[2])) == 1:
                cc = t
                break
        else:
            raise ArithmeticError(f"could not primitivize {cc}")
    Bp = modsym.matmul3(B, _complete_to_sl3(cc))
    if Bp[1][0] % p or Bp[2][0] % p or Bp[0][0] % p == 0:
        raise ArithmeticError(f"first-column fix failed for {B}")
    return Bp


def _raw_reps_E(ell):
    """One matrix per index-l column lattice {v : u.v = 0 mod l}."""
    reps = [[[1, 0, 0], [0, 1, 0], [0, 0, ell]]]
    for c in range(ell):
        reps.append([[1, 0, 0], [0, ell, c], [0, 0, 1]])
    for a in range(ell):
        for b in range(ell):
            reps.append([[ell, a, b], [0, 1, 0], [0, 0, 1]])
    return reps


def _raw_reps_F(ell):
    """One matrix per column lattice l Z^3 + Z t, determinant l^2."""
    reps = [[[ell, 0, 0], [0, ell, 0], [0, 0, 1]]]
    for c in range(ell):
        reps.append([[ell, 0, 0], [0, 1, 0], [0, c, ell]])
    for a in range(ell):
        for b in range(ell):
            reps.append([[1, 0, 0], [a, ell, 0], [b, 0, ell]])
    return reps


class CosetReps:
    """Left-coset representatives of Gamma A Gamma, invariants checked."""

    def __init__(self, mats, kind):
        self.mats = mats
        self.kind = kind
        self._check()

    def _check(self):
        ell = self.kind.ell
        p = self.kind.level.p
        want_det = ell if self.kind.kind == "E" else ell * ell
        n = ell * ell + ell + 1
        if len(self.mats) != n:
            raise AssertionError(f"expected {n} representatives")
        for B in self.mats:
            if modsym.det3(B) != want_det:
                raise AssertionError(f"determinant of {B} is not {want_det}")
            if B[1][0] % p or B[2][0] % p or B[0][0] % p == 0:
                raise AssertionError(f"{B} not in the double coset mod p")
        # pairwise distinct left cosets: B_i^{-1} B_j not in Gamma_0(3,p),
        # i.e. adj(B_i) B_j / det is never an integer matrix with the
        # first-column congruence.  Vectorized over pairs in chunks.
        n = len(self.mats)
        B = np.array(self.mats, dtype=np.int64)
        adj = np.array([modsym.adjugate(m) for m in self.mats], dtype=np.int64)
        d = want_det
        for i0 in range(0, n, 256):
            i1 = min(i0 + 256, n)
            prod = np.einsum("iab,jbc->ijac", adj[i0:i1], B)
            integral = (prod % d == 0).all(axis=(2, 3))
            integral[np.arange(i0, i1) - i0, np.arange(i0, i1)] = False
            ii, jj = np.nonzero(integral)
            for a, b in zip(ii, jj):
                G = (prod[a, b] // d).tolist()
                if (
                    abs(modsym.det3(G)) == 1
                    and G[1][0] % p == 0
                    and G[2][0] % p == 0
                ):
                    raise AssertionError(
                        f"representatives {i0 + a} and {b} share a coset"
                    )


def coset_reps(k):
    """The l^2+l+1 left-coset representatives for the operator k."""
    raw = _raw_reps_E(k.ell) if k.kind == "E" else _raw_reps_F(k.ell)
    p = k.level.p
    return CosetReps([_fix_first_column(B, p) for B in raw], k)


# ---------------------------------------------------------------------------
# annihilator operators


def _sym_lift(a, p):
    a %= p
    return a if a <= p // 2 else a - p


def _Qxy(x, y, p):
    return [[1, 0, 0], [_sym_lift(x, p), 1, 0], [_sym_lift(y, p), 0, 1]]


class AnnihilatorOp:
    """R_{x,y,z}: signed sum of four unimodular lower-unitriangular Q's."""

    def __init__(self, params, terms):
        self.params = params
        self.terms = terms  # list of (sign, matrix)

    def __repr__(self):
        return "R_{%d,%d,%d}" % self.params


def make_R(x, y, z, level):
    p = level.p
    x %= p
    y %= p
    z %= p
    if x == 0 or y == 0 or z == 0:
        raise ZeroCoordinateError(f"xyz = 0 mod {p} for ({x},{y},{z})")
    xi = pow(x, p - 2, p)
    terms = [
        (1, _Qxy(x, y, p)),
        (1, _Qxy(y, z, p)),
        (1, _Qxy(z, x, p)),
        (-1, _Qxy(y * xi % p, z * xi % p, p)),
    ]
    return AnnihilatorOp((x, y, z), terms)


def pair(R, f):
    """<R, f> = f(1:x:y) + f(1:y:z) + f(1:z:x) - f(1:y/x:z/x)."""
    total = 0
    for sign, Q in R.terms:
        idx = p2_index(Q[0][0], Q[1][0], Q[2][0], f.level)
        total += sign * int(f.values[idx])
    return total % f.q


@lru_cache(maxsize=200000)
def _reduced_first_columns(rows):
    """Reduction of a symbol to unimodular terms, as (coef, first column).

    rows is a tuple-of-tuples integer matrix.  The result is independent
    of the level, so it is cached across basis vectors and R operators.
    """
    S = modsym.reduce_to_unimodular([list(r) for r in rows])
    return tuple((coef, sym.first_column()) for coef, sym in S)


def pair_hecke(R, f, reps):
    """<R, T* f> = sum over signed Q's and representatives B of the
    evaluation of the reduced symbol [Q B] against f."""
    total = 0
    for sign, Q in R.terms:
        for B in reps.mats:
            prod = modsym.matmul3(Q, B)
            for coef, col in _reduced_first_columns(
                tuple(tuple(r) for r in prod)
            ):
                idx = p2_index(col[0], col[1], col[2], f.level)
                total += sign * coef * int(f.values[idx])
    return total % f.q


# ---------------------------------------------------------------------------
# the 2x2 matrices on U


def _lift_order(p):
    """Residues 1..p-1 ordered by |symmetric lift|, positive lift first."""
    order = []
    for a in range(1, p // 2 + 1):
        order.append(a)
        if a != (p - a) % p:
            order.append(p - a)
    return order


def select_R_pair(basis):
    """Two R operators with invertible plain-pairing matrix P.

    basis is the pair of U-kernel functions.  The scan runs over triples
    (x,y,z) ordered by symmetric lift; existence of an invertible pair is
    guaranteed by the spanning of the annihilator operators.
    """
    if len(basis) != 2:
        raise ValueError("select_R_pair requires a 2-dimensional basis")
    level = basis[0].level
    q = basis[0].q
    order = _lift_order(level.p)
    seen = []
    for x in order:
        for y in order:
            for z in order:
                R = make_R(x, y, z, level)
                row = [pair(R, f) for f in basis]
                if not any(row):
                    continue
                for R1, row1 in seen:
                    det = (row1[0] * row[1] - row1[1] * row[0]) % q
                    if det:
                        P = np.array([row1, row], dtype=np.int64)
                        return (R1, R), P
                seen.append((R, row))
    raise ExhaustedError("no invertible pairing pair of R operators")


class HeckeMatrix:
    """Matrix of the adjoint Hecke action on U in the fixed kernel basis."""

    def __init__(self, mat, kind, q):
        self.mat = mat
        self.kind = kind
        self.q = q

    def charpoly(self):
        return charpoly_2x2(self.mat, self.q)

    def __repr__(self):
        return f"HeckeMatrix({self.kind!r}, {self.mat.tolist()})"


def hecke_matrix(k, basis, Rpair, P, reps=None):
    """P^{-1} H where H_{kj} = pair_hecke(R_k, f_j, reps)."""
    q = basis[0].q
    if reps is None:
        reps = coset_reps(k)
    H = np.array(
        [[pair_hecke(R, f, reps) for f in basis] for R in Rpair],
        dtype=np.int64,
    )
    det = int(P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]) % q
    dinv = pow(det, q - 2, q)
    Pinv = (
        np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]], dtype=np.int64)
        * dinv
        % q
    )
    return HeckeMatrix(Pinv @ H % q, k, q)
