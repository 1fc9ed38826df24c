"""Lifting mod-q Hecke data to exact algebraic integers in Z[sqrt(D)].

The Ramanujan bound |e_l| <= 3l confines the trace of the characteristic
polynomial to [-6l, 6l] and its constant term to [0, 9l^2].  For
l < sqrt(q)/3 those windows contain exactly one representative of each
residue class mod q, so the polynomial lifts uniquely.  For larger l the
splitting field Q(sqrt(D)) detected from the small-l polynomials
constrains an eigenvalue a + b*sqrt(D) to a^2 + |D| b^2 <= 9 l^2, and
the short b-window is enumerated instead.

A fixed common eigenvector resolves the global conjugation ambiguity of
sqrt(D): the eigenvalue at the reference prime (the smallest l whose
reduced polynomial has two distinct roots in F_q) is normalized to have
b > 0.
"""

import math

import numpy as np

from .exactla import sqrt_mod_q


class OutOfBoundError(ArithmeticError):
    """No lift inside the Ramanujan window (upstream fault)."""


class AmbiguousError(ArithmeticError):
    """Two lifts inside the window (cannot happen for l < sqrt(q)/3)."""


class InconsistentFieldError(ArithmeticError):
    """Charpolys at one level disagree on the splitting field."""


class RealFieldError(NotImplementedError):
    """A totally real splitting field was detected (unsupported)."""


class NoSplitOperatorError(RuntimeError):
    """No reduced charpoly splits with distinct roots over F_q."""


class NotCommutingError(RuntimeError):
    """A Hecke matrix does not preserve the chosen eigenbasis."""


class NoLiftError(ArithmeticError):
    """No (a, b) within the Ramanujan ellipse matches the residue."""


class MultiLiftError(ArithmeticError):
    """Several candidates match; l is too large for this q."""

    def __init__(self, candidates):
        super().__init__(f"ambiguous lift: {candidates}")
        self.candidates = candidates


class LiftedCharPoly:
    """T^2 - trace*T + constant with exact integer coefficients."""

    def __init__(self, trace, constant, ell, source=None):
        self.trace = trace
        self.constant = constant
        self.ell = ell
        self.source = source

    @property
    def disc(self):
        return self.trace * self.trace - 4 * self.constant

    def __repr__(self):
        return f"T^2 - ({self.trace})T + ({self.constant})"


class QuadField:
    """Q(sqrt(D)) with a fixed square root s of D mod q; D=0 is Q."""

    def __init__(self, D, q):
        self.D = D
        self.q = q
        self.s = 0 if D == 0 else sqrt_mod_q(D % q, q)

    def __repr__(self):
        return f"Q(sqrt({self.D}))" if self.D else "Q"


class AlgebraicEigenvalue:
    """a + b*sqrt(D), with a, b exact integers."""

    def __init__(self, a, b, ell, kind=None):
        self.a = a
        self.b = b
        self.ell = ell
        self.kind = kind

    def conjugate(self):
        return AlgebraicEigenvalue(self.a, -self.b, self.ell, self.kind)

    def charpoly(self, D):
        """The monic quadratic with roots a +- b sqrt(D): (trace, const)."""
        return 2 * self.a, self.a * self.a + abs(D) * self.b * self.b

    def residue(self, K):
        return (self.a + self.b * K.s) % K.q

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraicEigenvalue)
            and (self.a, self.b) == (other.a, other.b)
        )

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.b}w{self.a:+d}"


class LocalFactor:
    """Degree-3 Euler factor 1 - e X + f l X^2 - l^3 X^3, X = l^{-s}.

    Coefficients are (a, b) pairs representing a + b*sqrt(D).  selfdual
    records whether f is the conjugate of e, in which case this is the
    standard local factor 1 - a_l X + conj(a_l) l X^2 - l^3 X^3.
    """

    def __init__(self, e, f, ell):
        self.ell = ell
        self.coeffs = [
            (1, 0),
            (-e.a, -e.b),
            (f.a * ell, f.b * ell),
            (-(ell ** 3), 0),
        ]
        self.selfdual = (f.a, f.b) == (e.a, -e.b)


def _window_lift(residue, q, lo, hi):
    """All representatives of residue mod q inside [lo, hi]."""
    residue %= q
    out = []
    k = -((residue - lo) // q)
    while residue + k * q <= hi:
        if residue + k * q >= lo:
            out.append(residue + k * q)
        k += 1
    return out


def lift_charpoly(fred, ell, source=None):
    """Unique Ramanujan-window lift of a reduced charpoly (l < sqrt(q)/3)."""
    q = fred.q
    c0 = fred.coeffs[0] if fred.degree >= 0 else 0
    c1 = fred.coeffs[1] if fred.degree >= 1 else 0
    traces = _window_lift(-c1, q, -6 * ell, 6 * ell)
    consts = _window_lift(c0, q, 0, 9 * ell * ell)
    if not traces or not consts:
        raise OutOfBoundError(
            f"no Ramanujan lift at l={ell}: trace {(-c1) % q}, const {c0}"
        )
    if len(traces) > 1 or len(consts) > 1:
        raise AmbiguousError(f"non-unique lift at l={ell}; q too small")
    return LiftedCharPoly(traces[0], consts[0], ell, source)


def squarefree_part(n):
    """The squarefree integer d with n = d * m^2 (sign preserved)."""
    if n == 0:
        return 0
    sign = 1 if n > 0 else -1
    n = abs(n)
    d = 1
    f = 2
    while f * f <= n:
        e = 0
        while n % f == 0:
            n //= f
            e += 1
        if e % 2:
            d *= f
        f += 1
    return sign * d * n


def _is_square(n):
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def detect_field(polys, q):
    """The common splitting field of the lifted charpolys.

    Polys whose discriminant is a perfect square (split or repeated
    rational roots) impose no constraint; if none constrains, the
    rational field QuadField(0) is returned.
    """
    D = None
    for lp in polys:
        disc = lp.disc
        if _is_square(disc):
            continue
        d = squarefree_part(disc)
        if d > 0:
            raise RealFieldError(f"real field Q(sqrt({d})) not supported")
        if D is None:
            D = d
        elif D != d:
            raise InconsistentFieldError(f"both sqrt({D}) and sqrt({d})")
    return QuadField(D if D is not None else 0, q)


def lift_eigenvalue(lam, ell, K, conj=None):
    """The (a, b) with a + b sqrt(D) = lam mod q and a^2 + |D| b^2 <= 9l^2.

    When the residue of the conjugate eigenvalue (the other root of the
    reduced charpoly) is supplied, the residue classes of a and b are
    pinned individually -- a = (lam + conj)/2, b = (lam - conj)/(2s) --
    and each window contains at most one lift, so the answer is unique
    for any l well below q/6.  Without it, all b-lifts in the window
    [-3l/sqrt(|D|), 3l/sqrt(|D|)] are enumerated, which can be ambiguous
    once 6l exceeds the shortest vector of the collision lattice
    {(a, b) : a + b s = 0 mod q}; ambiguity is surfaced as MultiLift.
    """
    q = K.q
    lam %= q
    cands = []
    if K.D == 0:
        for a in _window_lift(lam, q, -3 * ell, 3 * ell):
            cands.append((a, 0))
    else:
        absD = abs(K.D)
        bwin = int(3 * ell / absD**0.5) + 1
        if conj is not None:
            inv2 = pow(2, q - 2, q)
            invs = pow(K.s, q - 2, q)
            a_res = (lam + conj) * inv2 % q
            b_res = (lam - conj) * inv2 * invs % q
            for b in _window_lift(b_res, q, -bwin, bwin):
                for a in _window_lift(a_res, q, -3 * ell, 3 * ell):
                    if (a + b * K.s - lam) % q:
                        continue
                    if a * a + absD * b * b <= 9 * ell * ell:
                        cands.append((a, b))
        else:
            for b in range(-bwin, bwin + 1):
                for a in _window_lift(lam - b * K.s, q, -3 * ell, 3 * ell):
                    if a * a + absD * b * b <= 9 * ell * ell:
                        cands.append((a, b))
    if not cands:
        raise NoLiftError(f"no lift of {lam} at l={ell} in {K!r}")
    if len(cands) > 1:
        raise MultiLiftError(cands)
    a, b = cands[0]
    return AlgebraicEigenvalue(a, b, ell)


class EigenTracker:
    """A fixed common eigenvector of the Hecke matrices over F_q."""

    def __init__(self, ref_ell, vec, q):
        self.ref_ell = ref_ell
        self.vec = vec
        self.q = q

    def eigenvalue_of(self, mat):
        """Eigenvalue of a 2x2 matrix on the tracked vector.

        Raises NotCommutingError when the vector is not an eigenvector.
        """
        q = self.q
        w = np.asarray(mat, dtype=np.int64) @ self.vec % q
        i = 0 if self.vec[0] % q else 1
        lam = int(w[i]) * pow(int(self.vec[i]), q - 2, q) % q
        if np.any((w - lam * self.vec) % q):
            raise NotCommutingError("tracked vector is not an eigenvector")
        return lam


def fix_eigenvector(mats, K):
    """Choose the common eigenvector, normalized to b > 0 at the reference.

    mats maps l -> 2x2 matrix (one kind, ascending l).  The reference is
    the smallest l whose charpoly has two distinct roots in F_q; its two
    eigenvectors are computed and the one whose lifted eigenvalue has
    b > 0 is kept.  Every other matrix is verified to act diagonally.
    """
    from .exactla import charpoly_2x2, quadratic_roots

    q = K.q
    ref = None
    for ell in sorted(mats):
        M = np.asarray(mats[ell], dtype=np.int64)
        roots = quadratic_roots(charpoly_2x2(M, q))
        if len(roots) == 2 and roots[0] != roots[1]:
            ref = (ell, M, roots)
            break
    if ref is None:
        raise NoSplitOperatorError(
            "every reduced charpoly is irreducible or repeated over F_q"
        )
    ell, M, roots = ref
    chosen = None
    for r in roots:
        # eigenvector of M for eigenvalue r: kernel of M - rI
        A = (M - r * np.eye(2, dtype=np.int64)) % q
        if A[0, 0] % q or A[0, 1] % q:
            v = np.array([A[0, 1] % q, (-A[0, 0]) % q], dtype=np.int64)
        else:
            v = np.array([A[1, 1] % q, (-A[1, 0]) % q], dtype=np.int64)
        if not np.any(v % q):
            continue
        other = roots[1] if r == roots[0] else roots[0]
        eig = lift_eigenvalue(r, ell, K, conj=other)
        if K.D == 0 or eig.b > 0:
            chosen = v
            break
        if chosen is None:
            fallback = v
    if chosen is None:
        chosen = fallback
    tracker = EigenTracker(ell, chosen % q, q)
    for l2, M2 in mats.items():
        tracker.eigenvalue_of(M2)  # raises NotCommutingError on failure
    return tracker


def local_factor(e, f, ell):
    """Local Euler factor from the E- and F-eigenvalues at l."""
    if e.ell != ell or f.ell != ell:
        raise ValueError("eigenvalues are not at the requested prime")
    return LocalFactor(e, f, ell)
