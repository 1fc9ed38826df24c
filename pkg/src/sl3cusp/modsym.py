"""Modular symbols for SL(3) and reduction to unimodular symbols.

A modular symbol [Q] is a 3x3 integer matrix with nonzero rows, taken up
to scaling any row by a nonzero rational and alternating under row
swaps.  Symbols with det 0 are degenerate and evaluate to zero.  Any
symbol is a finite sum of unimodular ones (det +-1) via the recursion

    [q1, q2, q3] = [v, q2, q3] + [q1, v, q3] + [q1, q2, v]

where v is chosen so that all three replacement determinants are at most
d^(2/3) in absolute value (d = |det Q|); such a v exists by Minkowski's
theorem.  The reducing vector is found through the adjugate: if
w = v . adj(Q) then the replacement determinants are exactly the entries
of w, so we lattice-reduce the rows of adj(Q) and look for a short
integer combination in the sup-norm ball of radius d^(2/3).
"""

from math import gcd


class ZeroRowError(ValueError):
    """A modular symbol was built from a matrix with a zero row."""


class SearchExhausted(RuntimeError):
    """No reducing vector found; indicates an internal fault."""


def det3(M):
    a, b, c = M[0]
    d, e, f = M[1]
    g, h, i = M[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def adjugate(M):
    a, b, c = M[0]
    d, e, f = M[1]
    g, h, i = M[2]
    return [
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ]


def matmul3(A, B):
    return [
        [sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3)]
        for i in range(3)
    ]


def _content(r):
    return gcd(gcd(abs(r[0]), abs(r[1])), abs(r[2]))


class ModularSymbol:
    """Normalized symbol: primitive rows, det >= 0 (0 means degenerate)."""

    __slots__ = ("rows", "det", "degenerate")

    def __init__(self, rows, det):
        self.rows = rows
        self.det = det
        self.degenerate = det == 0

    def first_column(self):
        return (self.rows[0][0], self.rows[1][0], self.rows[2][0])

    def __repr__(self):
        return f"ModularSymbol({self.rows}, det={self.det})"


def normalize(Q):
    """ModularSymbol from a raw integer matrix.

    Rows are divided by their content; when det < 0 the first row is
    negated (row sign-scaling fixes the symbol class), so det >= 0.
    """
    rows = []
    for r in Q:
        g = _content(r)
        if g == 0:
            raise ZeroRowError(f"zero row in {Q}")
        rows.append([x // g for x in r])
    d = det3(rows)
    if d < 0:
        rows[0] = [-x for x in rows[0]]
        d = -d
    return ModularSymbol([tuple(r) for r in rows], d)


class SymbolSum:
    """Formal integer combination of unimodular symbols."""

    def __init__(self, terms):
        for _, s in terms:
            if s.det != 1:
                raise ValueError("SymbolSum terms must be unimodular")
        self.terms = list(terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def _lll3(basis):
    """Lattice-reduce a 3x3 integer basis (rows); float Gram-Schmidt.

    Candidates produced from the result are verified exactly, so float
    error can only cost search quality, not correctness.
    """
    b = [list(map(float, r)) for r in basis]
    bi = [list(r) for r in basis]
    n = 3

    def gs():
        bs = [None] * n
        mu = [[0.0] * n for _ in range(n)]
        for i in range(n):
            bs[i] = b[i][:]
            for j in range(i):
                denom = sum(x * x for x in bs[j])
                mu[i][j] = (
                    0.0
                    if denom == 0
                    else sum(b[i][k] * bs[j][k] for k in range(3)) / denom
                )
                bs[i] = [bs[i][k] - mu[i][j] * bs[j][k] for k in range(3)]
        return bs, mu

    k = 1
    steps = 0
    while k < n and steps < 200:
        steps += 1
        bs, mu = gs()
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r:
                b[k] = [b[k][t] - r * b[j][t] for t in range(3)]
                bi[k] = [bi[k][t] - r * bi[j][t] for t in range(3)]
                bs, mu = gs()
        if sum(x * x for x in bs[k]) >= (0.75 - mu[k][k - 1] ** 2) * sum(
            x * x for x in bs[k - 1]
        ):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bi[k], bi[k - 1] = bi[k - 1], bi[k]
            k = max(k - 1, 1)
    return bi


def _admissible_from_basis(red, rows, d, bound):
    """All primitive v with replacement dets <= bound, from combinations
    of the reduced adjugate basis with small coefficients."""
    found = []
    for c0 in range(-3, 4):
        for c1 in range(-3, 4):
            for c2 in range(-3, 4):
                if c0 == c1 == c2 == 0:
                    continue
                w = [
                    c0 * red[0][t] + c1 * red[1][t] + c2 * red[2][t]
                    for t in range(3)
                ]
                if max(abs(x) for x in w) > bound:
                    continue
                # w = v . adj(Q), so v = w . Q / d
                u = [sum(w[t] * rows[t][j] for t in range(3)) for j in range(3)]
                if any(x % d for x in u):
                    continue
                v = [x // d for x in u]
                g = _content(v)
                if g == 0:
                    continue
                found.append(tuple(x // g for x in v))
    return found


def find_reducing_vector(sym, tie_break="min"):
    """Primitive v whose three replacement determinants are <= det^(2/3).

    tie_break selects among admissible vectors: "min" takes the
    lexicographically smallest by (absolute entries, sign) — the
    deterministic default — while "max" takes the largest, which is used
    to exercise path independence of the reduction.
    """
    d = sym.det
    if d <= 1:
        raise ValueError("reducing vector only defined for det > 1")
    rows = [list(r) for r in sym.rows]
    bound = d ** (2.0 / 3.0) + 1e-9
    cands = _admissible_from_basis(_lll3(adjugate(rows)), rows, d, bound)
    if not cands:
        # fall back to direct enumeration of v in a sup-norm box
        B = max(max(abs(x) for x in r) for r in rows)
        adj = adjugate(rows)
        for v0 in range(-B, B + 1):
            for v1 in range(-B, B + 1):
                for v2 in range(-B, B + 1):
                    v = (v0, v1, v2)
                    if _content(v) != 1:
                        continue
                    w = [
                        sum(v[t] * adj[t][j] for t in range(3))
                        for j in range(3)
                    ]
                    if max(abs(x) for x in w) <= bound:
                        cands.append(v)
        if not cands:
            raise SearchExhausted(f"no reducing vector for det {d}: {rows}")
    keyed = sorted((tuple(abs(x) for x in v), v) for v in set(cands))
    return list(keyed[0][1] if tie_break == "min" else keyed[-1][1])


def reduce_to_unimodular(Q, tie_break="min"):
    """Express [Q] as a SymbolSum of unimodular symbols.

    Degenerate terms are dropped.  Terminates since the determinant
    shrinks from d to at most d^(2/3) at every level.
    """
    out = []

    def rec(M, coef):
        sym = normalize(M)
        if sym.degenerate:
            return
        if sym.det == 1:
            out.append((coef, sym))
            return
        v = find_reducing_vector(sym, tie_break=tie_break)
        for i in range(3):
            rows = [list(r) for r in sym.rows]
            rows[i] = v[:]
            rec(rows, coef)

    rec([list(r) for r in Q], 1)
    return SymbolSum(out)


def evaluate(S, f):
    """Pair a SymbolSum against f in W: sum of coef * f(first column)."""
    from .projective import first_column_point

    total = 0
    for coef, sym in S:
        pt = first_column_point([list(r) for r in sym.rows], f.level)
        total += coef * int(f.values[pt.index])
    return total % f.q
