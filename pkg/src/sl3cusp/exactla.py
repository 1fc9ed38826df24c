"""Exact linear algebra over F_q: sparse kernels, ranks, small charpolys.

Two solver paths are provided behind one interface:

  * elimination -- blocked Gaussian elimination.  Matrices are stored as
    int16 (q < 2^15), panels are staged through float64 and updated with
    BLAS matmul.  This is exact: every intermediate product is bounded by
    panel_width * q^2 < 2^53.
  * blackbox -- a Wiedemann-style solver for very large systems.  The
    rectangular system M is squared up as B = M^T D M with a random
    diagonal D, the minimal polynomial of B is found by Berlekamp-Massey
    on random projections, and kernel vectors are sampled by evaluating
    the x-free part of the minimal polynomial.  Candidates are verified
    against M exactly, and the nullity is confirmed with an independent
    re-randomization, so a wrong answer requires two correlated failures.

All randomized behavior is seeded; callers pass a seed derived from the
problem instance so runs are reproducible.
"""

import hashlib

import numpy as np
from scipy import sparse


class NonResidueError(ValueError):
    """Square root of a quadratic non-residue was requested."""


# ---------------------------------------------------------------------------
# scalar arithmetic


def sqrt_mod_q(a, q):
    """Deterministic square root of a mod q (odd prime q).

    Returns the smaller of the two roots in [0, q).  Raises NonResidueError
    when a is a non-residue.  Tonelli-Shanks.
    """
    a %= q
    if a == 0:
        return 0
    if pow(a, (q - 1) // 2, q) != 1:
        raise NonResidueError(f"{a} is not a square mod {q}")
    if q % 4 == 3:
        r = pow(a, (q + 1) // 4, q)
        return min(r, q - r)
    # write q - 1 = s * 2^e, find a non-residue n
    s, e = q - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    n = 2
    while pow(n, (q - 1) // 2, q) != q - 1:
        n += 1
    x = pow(a, (s + 1) // 2, q)
    b = pow(a, s, q)
    g = pow(n, s, q)
    r = e
    while True:
        t = b
        m = 0
        while t != 1:
            t = t * t % q
            m += 1
        if m == 0:
            return min(x, q - x)
        gs = pow(g, 1 << (r - m - 1), q)
        x = x * gs % q
        g = gs * gs % q
        b = b * g % q
        r = m


class PolyFq:
    """Polynomial over F_q, coefficients low-to-high, no trailing zeros."""

    def __init__(self, coeffs, q):
        coeffs = [int(c) % q for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.q = q

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.q
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, PolyFq)
            and other.q == self.q
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        return f"PolyFq({list(self.coeffs)}, q={self.q})"


def charpoly_2x2(A, q):
    """Characteristic polynomial T^2 - tr(A) T + det(A) of a 2x2 matrix."""
    a, b = int(A[0][0]), int(A[0][1])
    c, d = int(A[1][0]), int(A[1][1])
    tr = (a + d) % q
    det = (a * d - b * c) % q
    return PolyFq([det, -tr, 1], q)


def quadratic_roots(f):
    """Roots in F_q of a monic quadratic, with multiplicity.

    Returns [r, r] for a double root, [r1, r2] (sorted) for a split
    polynomial, and [] when f is irreducible over F_q.
    """
    if f.degree != 2 or f.coeffs[2] != 1:
        raise ValueError("expected a monic quadratic")
    q = f.q
    c0, c1, _ = f.coeffs
    disc = (c1 * c1 - 4 * c0) % q
    if disc == 0:
        r = -c1 * pow(2, q - 2, q) % q
        return [r, r]
    try:
        s = sqrt_mod_q(disc, q)
    except NonResidueError:
        return []
    half = pow(2, q - 2, q)
    r1 = (-c1 + s) * half % q
    r2 = (-c1 - s) * half % q
    return sorted([r1, r2])


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrixFq:
    """Row-sparse matrix over F_q.

    rows[i] is a sorted list of (column, value) pairs with values in
    (0, q).  Immutable by convention once handed to a solver.
    """

    def __init__(self, rows, ncols, q):
        self.q = q
        self.ncols = ncols
        clean = []
        for row in rows:
            d = {}
            for c, v in row:
                if not (0 <= c < ncols):
                    raise ValueError(f"column {c} out of range")
                d[c] = (d.get(c, 0) + v) % q
            clean.append(sorted((c, v) for c, v in d.items() if v))
        self.rows = clean

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def nnz(self):
        return sum(len(r) for r in self.rows)

    def to_dense(self, dtype=np.int64):
        A = np.zeros((self.nrows, self.ncols), dtype=dtype)
        for i, row in enumerate(self.rows):
            for c, v in row:
                A[i, c] = v
        return A

    def to_csr(self):
        data, indices, indptr = [], [], [0]
        for row in self.rows:
            for c, v in row:
                indices.append(c)
                data.append(v)
            indptr.append(len(indices))
        return sparse.csr_matrix(
            (np.array(data, dtype=np.int64), np.array(indices), np.array(indptr)),
            shape=(self.nrows, self.ncols),
        )

    def matvec(self, v):
        """Exact M v mod q for an int64 vector."""
        out = np.zeros(self.nrows, dtype=np.int64)
        for i, row in enumerate(self.rows):
            acc = 0
            for c, val in row:
                acc += val * int(v[c])
            out[i] = acc % self.q
        return out


def derive_seed(*parts):
    """Stable 64-bit seed from arbitrary labeled parts."""
    h = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(h[:8], "little")


# ---------------------------------------------------------------------------
# blocked elimination engine


def _inv_lower_mod(L, q):
    """Inverse of a small lower-triangular invertible matrix mod q."""
    k = L.shape[0]
    inv = np.zeros((k, k))
    for j in range(k):
        x = np.zeros(k)
        x[j] = pow(int(L[j, j]), q - 2, q)
        for i in range(j + 1, k):
            s = (-(L[i, :i] @ x[:i])) % q
            x[i] = s * pow(int(L[i, i]), q - 2, q) % q
        inv[:, j] = x
    return inv


def echelon_int16(A, q, panel=128, chunk=1024):
    """In-place echelon form over F_q of an int16 matrix with values in [0, q).

    Returns (rank, pivcols).  On return rows 0..rank-1 hold the echelon rows
    with pivots normalized to 1; the remaining rows are zero.
    """
    if q >= 1 << 15:
        raise ValueError("modulus too large for int16 storage")
    m, n = A.shape
    r = 0
    pivcols = []
    c = 0
    while c < n and r < m:
        w = min(panel, n - c)
        mloc = m - r
        P = A[r:, c : c + w].astype(np.float64)
        Lcols, locpiv, pcols = [], [], []
        for j in range(w):
            colv = P[:, j].copy()
            if locpiv:
                colv[locpiv] = 0.0
            nz = np.nonzero(colv)[0]
            if len(nz) == 0:
                continue
            pr = int(nz[0])
            pv = int(colv[pr])
            rest = nz[1:]
            if len(rest):
                mult = colv[rest] * pow(pv, q - 2, q) % q
                P[rest, j:] = (P[rest, j:] - np.outer(mult, P[pr, j:])) % q
            lc = np.zeros(mloc)
            lc[pr] = pv
            if len(rest):
                lc[rest] = colv[rest]
            Lcols.append(lc)
            locpiv.append(pr)
            pcols.append(c + j)
        k = len(locpiv)
        if k == 0:
            c += w
            continue
        Lfull = np.stack(Lcols, axis=1)
        piv = np.array(locpiv)
        mask = np.ones(mloc, dtype=bool)
        mask[piv] = False
        L11inv = _inv_lower_mod(Lfull[piv], q)
        L21 = Lfull[mask]
        nonpiv_rows = np.nonzero(mask)[0] + r
        # trailing columns: U = L11^-1 T_piv;  T_nonpiv -= L21 U
        for c2 in range(c + w, n, chunk):
            w2 = min(chunk, n - c2)
            Tp = A[r + piv, c2 : c2 + w2].astype(np.float64)
            U = L11inv @ Tp % q
            Tn = A[nonpiv_rows, c2 : c2 + w2].astype(np.float64)
            Tn = (Tn - L21 @ U) % q
            A[r + piv, c2 : c2 + w2] = U.astype(np.int16)
            A[nonpiv_rows, c2 : c2 + w2] = Tn.astype(np.int16)
        # panel columns
        Ppiv = L11inv @ A[r + piv, c : c + w].astype(np.float64) % q
        A[r + piv, c : c + w] = Ppiv.astype(np.int16)
        A[nonpiv_rows, c : c + w] = P[mask].astype(np.int16)
        # move pivot rows up, preserving the order of the rest
        order = np.concatenate([r + piv, nonpiv_rows])
        A[r:] = A[order]
        pivcols.extend(pcols)
        r += k
        c += w
    A[r:] = 0
    return r, pivcols


def kernel_from_echelon(A, rank, pivcols, ncols, q):
    """Kernel basis (ncols x nullity, int64) from echelon rows of A.

    Basis is in reduced form: free coordinates carry an identity block.
    """
    pivset = set(pivcols)
    freecols = [j for j in range(ncols) if j not in pivset]
    nf = len(freecols)
    X = np.zeros((ncols, nf))
    for t, j in enumerate(freecols):
        X[j, t] = 1.0
    for i in range(rank - 1, -1, -1):
        row = A[i, :ncols].astype(np.float64)
        pc = pivcols[i]
        s = row @ X % q
        s -= row[pc] * X[pc]
        X[pc] = (-s) % q
    return X.astype(np.int64)


# ---------------------------------------------------------------------------
# Wiedemann blackbox path


def berlekamp_massey(seq, q):
    """Minimal polynomial (monic, low-to-high coeffs) of a linear recurrence."""
    n = len(seq)
    C = np.zeros(n + 1, dtype=np.int64)
    B = np.zeros(n + 1, dtype=np.int64)
    C[0] = B[0] = 1
    L, m, b = 0, 1, 1
    for i in range(n):
        d = int(seq[i] + C[1 : L + 1] @ seq[i - L : i][::-1]) % q if L else int(seq[i]) % q
        if d == 0:
            m += 1
            continue
        coef = d * pow(int(b), q - 2, q) % q
        if 2 * L <= i:
            T = C.copy()
            C[m:] = (C[m:] - coef * B[: n + 1 - m]) % q
            L, B, b, m = i + 1 - L, T, d, 1
        else:
            C[m:] = (C[m:] - coef * B[: n + 1 - m]) % q
            m += 1
    # C(x) = 1 + c1 x + ... ; minimal polynomial is reversed C of degree L
    rev = C[: L + 1][::-1] % q
    return PolyFq(list(rev), q)


def _poly_gcd(a, b, q):
    a = list(a)
    b = list(b)
    while b:
        # a mod b
        inv = pow(b[-1], q - 2, q)
        while len(a) >= len(b):
            coef = a[-1] * inv % q
            off = len(a) - len(b)
            for i in range(len(b)):
                a[off + i] = (a[off + i] - coef * b[i]) % q
            while a and a[-1] == 0:
                a.pop()
            if not a:
                break
        a, b = b, a
    return a


def _poly_mul(a, b, q):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % q
    return out


def _poly_div(a, b, q):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    inv = pow(b[-1], q - 2, q)
    while len(a) >= len(b) and any(a):
        coef = a[-1] * inv % q
        off = len(a) - len(b)
        out[off] = coef
        for i in range(len(b)):
            a[off + i] = (a[off + i] - coef * b[i]) % q
        while a and a[-1] == 0:
            a.pop()
    return out


def _poly_lcm(a, b, q):
    if not a:
        return list(b)
    if not b:
        return list(a)
    g = _poly_gcd(a, b, q)
    return _poly_mul(_poly_div(a, g, q), b, q)


class _SquaredOp:
    """v -> M^T (d * (M v)) mod q, the squared-up blackbox operator."""

    def __init__(self, M, d, q):
        self.csr = M.to_csr()
        self.csc = self.csr.T.tocsr()
        self.d = d
        self.q = q
        self.n = M.ncols

    def apply(self, v):
        w = self.csr.dot(v) % self.q
        w = w * self.d % self.q
        return self.csc.dot(w) % self.q


def _minpoly_blackbox(op, q, rng, extra_confirm=2):
    """lcm of Krylov-sequence minimal polynomials until stable."""
    n = op.n
    mp = []
    stable = 0
    while stable < extra_confirm:
        u = rng.integers(0, q, size=n, dtype=np.int64)
        v = rng.integers(0, q, size=n, dtype=np.int64)
        seq = np.empty(2 * n + 2, dtype=np.int64)
        w = v.copy()
        for i in range(2 * n + 2):
            seq[i] = int(u @ w % q)
            w = op.apply(w)
        cand = list(berlekamp_massey(seq, q).coeffs)
        new = _poly_lcm(mp, cand, q)
        # normalize monic
        inv = pow(int(new[-1]), q - 2, q)
        new = [int(c) * inv % q for c in new]
        if new == mp:
            stable += 1
        else:
            mp, stable = new, 0
        if len(mp) > n + 1:
            raise RuntimeError("minimal polynomial degree exceeded dimension")
    return mp


def wiedemann_kernel(M, seed=0, max_rounds=6):
    """Kernel basis of a SparseMatrixFq by the squared-up Wiedemann method.

    Monte Carlo with exact verification: every returned vector satisfies
    M v = 0 exactly; the dimension is confirmed by an independent second
    randomization.  Returns an (ncols x nullity) int64 array.
    """
    q = M.q
    n = M.ncols

    def one_pass(tag):
        rng = np.random.default_rng(derive_seed("wiedemann", seed, tag))
        d = rng.integers(1, q, size=M.nrows, dtype=np.int64)
        op = _SquaredOp(M, d, q)
        mp = _minpoly_blackbox(op, q, rng)
        e = 0
        while e < len(mp) - 1 and mp[e] == 0:
            e += 1
        if e == 0:
            return np.zeros((n, 0), dtype=np.int64)  # B nonsingular
        h = mp[e:]
        basis = []
        misses = 0
        while misses < 2:
            v = rng.integers(0, q, size=n, dtype=np.int64)
            # w = h(B) v by Horner
            w = np.full(n, h[-1], dtype=np.int64) * v % q
            for c in reversed(h[:-1]):
                w = op.apply(w)
                if c:
                    w = (w + c * v) % q
            # push into the kernel of B if needed
            for _ in range(e):
                if not np.any(op.apply(w)):
                    break
                w = op.apply(w)
            if np.any(op.apply(w)) or np.any(M.matvec(w)):
                misses += 1  # bad diagonal or unlucky projection
                continue
            if not np.any(w):
                misses += 1
                continue
            cand = basis + [w]
            mat = np.array(cand, dtype=np.int16) % q
            rk, _ = echelon_int16(mat.copy(), q)
            if rk == len(cand):
                basis = cand
                misses = 0
            else:
                misses += 1
        return np.array(basis, dtype=np.int64).T if basis else np.zeros((n, 0), dtype=np.int64)

    best = None
    for round_idx in range(max_rounds):
        got = one_pass(round_idx)
        if best is None:
            best = got
            continue
        if got.shape[1] == best.shape[1]:
            return best if best.shape[1] >= got.shape[1] else got
        best = got if got.shape[1] > best.shape[1] else best
    return best


# ---------------------------------------------------------------------------
# public solver interface

ELIMINATION_MAX_COLS = 16000


def kernel_basis(M, method="auto", seed=0):
    """Linearly independent vectors spanning ker(M) over F_q.

    Returns a list of int64 arrays of length M.ncols.  Every vector is
    verified by exact multiplication before being returned.
    """
    if method == "auto":
        method = "elimination" if M.ncols <= ELIMINATION_MAX_COLS else "blackbox"
    if method == "elimination":
        A = M.to_dense(dtype=np.int16)
        rk, pivcols = echelon_int16(A, M.q)
        X = kernel_from_echelon(A, rk, pivcols, M.ncols, M.q)
    elif method == "blackbox":
        X = wiedemann_kernel(M, seed=seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    vecs = [X[:, j].copy() for j in range(X.shape[1])]
    for v in vecs:
        if np.any(M.matvec(v)):
            raise AssertionError("kernel vector failed exact verification")
    return vecs


def rank(M, method="auto", seed=0):
    """Rank of M over F_q; rank + nullity = ncols."""
    if method == "auto":
        method = "elimination" if M.ncols <= ELIMINATION_MAX_COLS else "blackbox"
    if method == "elimination":
        A = M.to_dense(dtype=np.int16)
        rk, _ = echelon_int16(A, M.q)
        return rk
    return M.ncols - len(kernel_basis(M, method="blackbox", seed=seed))
