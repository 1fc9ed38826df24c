import numpy as np
import pytest

from sl3cusp import modsym
from sl3cusp.hecke import (
    AnnihilatorOp,
    BadPrimeError,
    CosetReps,
    ExhaustedError,
    HeckeKind,
    ZeroCoordinateError,
    coset_reps,
    hecke_matrix,
    make_R,
    pair,
    pair_hecke,
    select_R_pair,
)
from sl3cusp.projective import PrimeLevel
from sl3cusp.wspaces import (
    WFunction,
    apply_alpha,
    apply_beta,
    build_U_system,
    build_W0_system,
)

Q = 12379


@pytest.fixture(scope="module")
def level53():
    lev = PrimeLevel(53)
    basis = build_U_system(lev, Q).kernel_functions()
    Rpair, P = select_R_pair(basis)
    return lev, basis, Rpair, P


def test_hecke_kind_validation():
    lev = PrimeLevel(13)
    with pytest.raises(BadPrimeError):
        HeckeKind("E", 13, lev)
    with pytest.raises(ValueError):
        HeckeKind("E", 4, lev)
    with pytest.raises(ValueError):
        HeckeKind("X", 2, lev)


@pytest.mark.parametrize("kind,ell", [("E", 2), ("F", 2), ("E", 3), ("F", 5)])
def test_coset_reps_invariants(kind, ell):
    # counts, determinants, double-coset membership, and pairwise
    # distinctness are all enforced inside the CosetReps constructor
    lev = PrimeLevel(13)
    reps = coset_reps(HeckeKind(kind, ell, lev))
    assert len(reps.mats) == ell * ell + ell + 1
    want = ell if kind == "E" else ell * ell
    assert all(modsym.det3(B) == want for B in reps.mats)


def test_coset_reps_detect_duplicates():
    lev = PrimeLevel(13)
    k = HeckeKind("E", 2, lev)
    good = coset_reps(k)
    mats = [m for m in good.mats]
    mats[1] = mats[0]  # duplicate coset
    with pytest.raises(AssertionError):
        CosetReps(mats, k)


def test_make_R_shapes():
    lev = PrimeLevel(7)
    R = make_R(1, 2, 3, lev)
    signs = [s for s, _ in R.terms]
    assert signs == [1, 1, 1, -1]
    # fourth term is Q_{y/x, z/x} = Q_{2,3}
    fourth = R.terms[3][1]
    assert (fourth[1][0] % 7, fourth[2][0] % 7) == (2, 3)
    for _, Qm in R.terms:
        assert modsym.det3(Qm) == 1
        assert Qm[0][0] == 1 and Qm[1][1] == 1 and Qm[2][2] == 1
    with pytest.raises(ZeroCoordinateError):
        make_R(0, 1, 1, lev)
    with pytest.raises(ZeroCoordinateError):
        make_R(1, 7, 1, lev)


def test_annihilation(level53):
    # pair(R, alpha g + beta g') = 0: Thm on the annihilator span
    lev, basis, _, _ = level53
    w0 = build_W0_system(lev, Q).kernel_functions()
    rng = np.random.default_rng(21)
    for _ in range(100):
        x, y, z = (int(v) for v in rng.integers(1, 53, 3))
        R = make_R(x, y, z, lev)
        g = w0[rng.integers(0, len(w0))]
        gp = w0[rng.integers(0, len(w0))]
        f = WFunction(
            (apply_alpha(g).values + apply_beta(gp).values) % Q, lev, Q
        )
        assert pair(R, f) == 0


def test_pair_matches_direct_evaluation(level53):
    lev, basis, _, _ = level53
    from sl3cusp.projective import p2_index

    f = basis[0]
    x, y, z = 1, 2, 3
    R = make_R(x, y, z, lev)
    xi = pow(x, 51, 53)
    direct = (
        f.values[p2_index(1, x, y, lev)]
        + f.values[p2_index(1, y, z, lev)]
        + f.values[p2_index(1, z, x, lev)]
        - f.values[p2_index(1, y * xi, z * xi, lev)]
    ) % Q
    assert pair(R, f) == direct


def test_pair_hecke_kills_Wnc(level53):
    lev, basis, Rpair, _ = level53
    w0 = build_W0_system(lev, Q).kernel_functions()
    f = WFunction(
        (apply_alpha(w0[0]).values + apply_beta(w0[1]).values) % Q, lev, Q
    )
    reps = coset_reps(HeckeKind("E", 2, lev))
    for R in Rpair:
        assert pair_hecke(R, f, reps) == 0


def test_select_R_pair_deterministic(level53):
    lev, basis, Rpair, P = level53
    R2, P2 = select_R_pair(basis)
    assert R2[0].params == Rpair[0].params and R2[1].params == Rpair[1].params
    assert np.array_equal(P, P2)
    det = int(P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]) % Q
    assert det != 0


def test_select_R_pair_degenerate_inputs(level53):
    lev, basis, _, _ = level53
    with pytest.raises(ValueError):
        select_R_pair(basis[:1])
    zero = WFunction(np.zeros(lev.n_p2), lev, Q)
    with pytest.raises(ExhaustedError):
        select_R_pair([basis[0], zero])


def test_hecke_matrices_commute(level53):
    lev, basis, Rpair, P = level53
    mats = []
    for kind in ("E", "F"):
        for ell in (2, 3):
            M = hecke_matrix(HeckeKind(kind, ell, lev), basis, Rpair, P)
            mats.append(M.mat)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            assert np.array_equal(
                mats[i] @ mats[j] % Q, mats[j] @ mats[i] % Q
            )


def test_E_F_same_charpoly(level53):
    # selfduality at this level: E_l and F_l share characteristic polys
    lev, basis, Rpair, P = level53
    for ell in (2, 3):
        cE = hecke_matrix(HeckeKind("E", ell, lev), basis, Rpair, P).charpoly()
        cF = hecke_matrix(HeckeKind("F", ell, lev), basis, Rpair, P).charpoly()
        assert cE == cF


def _random_gamma(rng, p):
    """Random element of Gamma_0(3,p): SL(3,Z), first column (*,0,0) mod p."""
    G = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    gens = []
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        E = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        E[i][j] = int(rng.integers(-2, 3))
        gens.append(E)
    for (i, j) in ((1, 0), (2, 0)):
        E = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        E[i][j] = p * int(rng.integers(-1, 2))
        gens.append(E)
    E = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    E[2][1] = int(rng.integers(-2, 3))
    gens.append(E)
    for E in gens:
        G = modsym.matmul3(G, E)
    return G


def test_rep_choice_invariance(level53):
    lev, basis, Rpair, P = level53
    rng = np.random.default_rng(17)
    k = HeckeKind("E", 2, lev)
    reps = coset_reps(k)
    base = hecke_matrix(k, basis, Rpair, P, reps=reps).mat
    twisted = [modsym.matmul3(B, _random_gamma(rng, 53)) for B in reps.mats]
    reps2 = CosetReps(twisted, k)
    again = hecke_matrix(k, basis, Rpair, P, reps=reps2).mat
    assert np.array_equal(base, again)
