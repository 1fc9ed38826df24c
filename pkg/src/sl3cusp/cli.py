"""Command-line driver: dimension sweeps, Hecke pipelines, verification.

Artifacts are written under the output directory (``--outdir`` or the
SL3CUSP_OUTDIR environment variable):

  dims/p<p>.json    per-level dimension records
  hecke/p<p>.json   per-level Hecke records (eigenvalues, local factors)

Every artifact carries the hash of the configuration that produced it
and the solver seed, and is written atomically (temp file + rename).
Re-running a command skips levels whose artifact already matches the
current configuration.
"""

import csv
import hashlib
import json
import os
import sys
import time

import click

DEFAULT_MODULI = (12379, 31991, 13001)
DEFAULT_LMAX = 47


def _setup_threads():
    budget = os.environ.get("SL3CUSP_THREADS")
    if budget:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, budget)


class RunConfig:
    def __init__(self, moduli=DEFAULT_MODULI, lmax=DEFAULT_LMAX, ops=("E", "F"),
                 method="auto", outdir=None):
        from .projective import is_prime

        self.moduli = tuple(moduli)
        for q in self.moduli:
            if q == 2 or not is_prime(q):
                raise ValueError(f"modulus {q} is not an odd prime")
        self.lmax = lmax
        self.ops = tuple(ops)
        self.method = method
        self.outdir = outdir or os.environ.get("SL3CUSP_OUTDIR", "results")

    def hash(self):
        key = repr((self.moduli, self.lmax, self.ops, self.method))
        return hashlib.sha256(key.encode()).hexdigest()[:12]


def _atomic_write_json(path, obj):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def _load_if_current(path, config_hash):
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            rec = json.load(fh)
    except (OSError, ValueError):
        return None
    return rec if rec.get("config_hash") == config_hash else None


def _seed_for(p, q):
    from .exactla import derive_seed

    return derive_seed("sl3cusp", p, q)


def compute_dims(p, config):
    """Dimension of U at level p under every configured modulus."""
    from .projective import PrimeLevel
    from .wspaces import build_U_system

    level = PrimeLevel(p)
    dims = {}
    for q in config.moduli:
        if q == p:
            continue
        system = build_U_system(level, q)
        dims[q] = system.nullity(method=config.method, seed=_seed_for(p, q))
    return dims


def dims_record(p, config):
    """Cached per-level dimension record (computes and persists if absent)."""
    path = os.path.join(config.outdir, "dims", f"p{p}.json")
    rec = _load_if_current(path, config.hash())
    if rec is None:
        t0 = time.time()
        dims = compute_dims(p, config)
        rec = {
            "p": p,
            "dims": {str(q): d for q, d in dims.items()},
            "config_hash": config.hash(),
            "seed": _seed_for(p, config.moduli[0]),
            "seconds": round(time.time() - t0, 2),
        }
        _atomic_write_json(path, rec)
    return rec


def hecke_record(p, config, verbose=False):
    """Full Hecke pipeline at level p: dims, matrices, lifts, L-factors."""
    from . import hecke as hk
    from . import lift as lf
    from .projective import PrimeLevel, is_prime
    from .wspaces import build_U_system

    path = os.path.join(config.outdir, "hecke", f"p{p}.json")
    cached = _load_if_current(path, config.hash())
    if cached is not None:
        return cached

    drec = dims_record(p, config)
    dims = set(drec["dims"].values())
    if len(dims) != 1:
        raise RuntimeError(f"dimension mismatch across moduli at p={p}: {drec['dims']}")
    dim = dims.pop()
    if dim != 2:
        raise click.ClickException(
            f"Hecke pipeline requires dim U = 2 at p={p}, found {dim}"
        )

    level = PrimeLevel(p)
    ells = [l for l in range(2, config.lmax + 1) if is_prime(l) and l != p]
    record = None
    for qi, q in enumerate(config.moduli):
        if q == p:
            continue
        try:
            record = _hecke_under_q(level, q, ells, config, verbose)
            record["q_used"] = [int(k) for k in drec["dims"]]
            record["q_hecke"] = q
            break
        except lf.NoSplitOperatorError:
            if verbose:
                click.echo(f"  q={q}: no split operator, retrying with next modulus")
            continue
    if record is None:
        raise click.ClickException(f"no configured modulus admits a split operator at p={p}")
    record["config_hash"] = config.hash()
    _atomic_write_json(path, record)
    return record


def _hecke_under_q(level, q, ells, config, verbose):
    import numpy as np

    from . import hecke as hk
    from . import lift as lf

    p = level.p
    from .wspaces import build_U_system

    system = build_U_system(level, q)
    basis = system.kernel_functions(method=config.method, seed=_seed_for(p, q))
    Rpair, P = hk.select_R_pair(basis)

    def is_small(ell):
        # both Ramanujan windows contain a single residue representative
        return 9 * ell * ell < q

    mats = {}
    lifted = []
    for ell in ells:
        t0 = time.time()
        for op in config.ops:
            k = hk.HeckeKind(op, ell, level)
            mats[(op, ell)] = hk.hecke_matrix(k, basis, Rpair, P)
        if "E" in config.ops and is_small(ell):
            lifted.append(lf.lift_charpoly(mats[("E", ell)].charpoly(), ell))
        if verbose:
            click.echo(f"  l={ell}: {time.time() - t0:.1f}s")

    K = lf.detect_field(lifted, q)
    ref_kind = "E" if "E" in config.ops else config.ops[0]
    tracker = lf.fix_eigenvector(
        {ell: mats[(ref_kind, ell)].mat for ell in ells}, K
    )

    entries = []
    eigs = {}
    for ell in ells:
        for op in config.ops:
            M = mats[(op, ell)]
            cp = M.charpoly()
            status = "ok"
            lift_part = None
            eig_part = None
            try:
                lam = tracker.eigenvalue_of(M.mat)
                conj = (int(M.mat[0, 0] + M.mat[1, 1]) - lam) % q
                e = lf.lift_eigenvalue(lam, ell, K, conj=conj)
                eigs[(op, ell)] = e
                eig_part = {"a": e.a, "b": e.b}
                if is_small(ell):
                    lp = lf.lift_charpoly(cp, ell)
                    lift_part = {"trace": lp.trace, "const": lp.constant}
                    # the two lifting routes must agree
                    if e.charpoly(K.D) != (lp.trace, lp.constant):
                        raise lf.OutOfBoundError(
                            f"poly/eigenvalue lift mismatch at l={ell}"
                        )
                else:
                    tr, c = e.charpoly(K.D)
                    lift_part = {"trace": tr, "const": c}
            except lf.MultiLiftError as exc:
                status = f"ambiguous: {exc.candidates}"
            entries.append(
                {
                    "l": ell,
                    "op": op,
                    "charpoly_red": [cp.coeffs[0], cp.coeffs[1]],
                    "lift": lift_part,
                    "eig": eig_part,
                    "status": status,
                }
            )

    factors = []
    if set(config.ops) == {"E", "F"}:
        for ell in ells:
            if (("E", ell)) in eigs and (("F", ell)) in eigs:
                lfac = lf.local_factor(eigs[("E", ell)], eigs[("F", ell)], ell)
                factors.append(
                    {"l": ell, "coeffs": lfac.coeffs, "selfdual": lfac.selfdual}
                )

    return {
        "p": p,
        "dim": 2,
        "D": K.D,
        "reference_l": tracker.ref_ell,
        "seed": _seed_for(p, q),
        "entries": entries,
        "local_factors": factors,
    }


# ---------------------------------------------------------------------------
# commands


@click.group()
def main():
    """Cuspidal cohomology of congruence subgroups of SL(3,Z)."""
    _setup_threads()


def _parse_moduli(qs):
    return tuple(int(x) for x in qs.split(",")) if qs else DEFAULT_MODULI


@main.command()
@click.option("--min", "pmin", type=int, required=True, help="lower end of prime range")
@click.option("--max", "pmax", type=int, required=True, help="upper end (exclusive)")
@click.option("--q", "qs", default=None, help="comma-separated moduli")
@click.option("--out", default=None, help="CSV output path (default stdout)")
@click.option("--outdir", default=None)
@click.option("--method", default="auto", type=click.Choice(["auto", "elimination", "blackbox"]))
def dims(pmin, pmax, qs, out, outdir, method):
    """Dimension of U for every prime p in [--min, --max)."""
    from .projective import is_prime

    config = RunConfig(moduli=_parse_moduli(qs), method=method, outdir=outdir)
    rows = []
    for p in range(max(pmin, 2), pmax):
        if not is_prime(p):
            continue
        rec = dims_record(p, config)
        for q, d in sorted(rec["dims"].items(), key=lambda kv: int(kv[0])):
            rows.append((p, int(q), d))
        click.echo(f"p={p}: " + " ".join(f"dim={d}(q={q})" for p_, q, d in rows if p_ == p), err=True)
    target = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        writer = csv.writer(target)
        writer.writerow(["p", "q", "dim"])
        writer.writerows(rows)
    finally:
        if out:
            target.close()


@main.command()
@click.option("--p", "p", type=int, required=True)
@click.option("--lmax", type=int, default=DEFAULT_LMAX)
@click.option("--ops", default="E,F")
@click.option("--q", "qs", default=None, help="comma-separated moduli")
@click.option("--out", default=None, help="JSON output path (default stdout)")
@click.option("--outdir", default=None)
@click.option("-v", "--verbose", is_flag=True)
def hecke(p, lmax, ops, qs, out, outdir, verbose):
    """Hecke eigenvalues and local factors at level p (requires dim U = 2)."""
    config = RunConfig(
        moduli=_parse_moduli(qs),
        lmax=lmax,
        ops=tuple(ops.split(",")),
        outdir=outdir,
    )
    rec = hecke_record(p, config, verbose=verbose)
    text = json.dumps(rec, indent=1)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@main.command()
@click.option("--deep", is_flag=True, help="include the p=53 suites")
def verify(deep):
    """Run the invariant suites; nonzero exit on any failure."""
    failures = run_verification(deep=deep, echo=click.echo)
    if failures:
        raise SystemExit(1)


@main.command(name="export")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), required=True)
@click.option("--out", default=None)
@click.option("--outdir", default=None)
def export_cmd(fmt, out, outdir):
    """Combine per-level artifacts into one CSV or JSON document."""
    outdir = outdir or os.environ.get("SL3CUSP_OUTDIR", "results")
    dims_dir = os.path.join(outdir, "dims")
    hecke_dir = os.path.join(outdir, "hecke")
    levels = {}
    for d in (dims_dir, hecke_dir):
        if not os.path.isdir(d):
            continue
        for name in sorted(os.listdir(d)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(d, name), encoding="utf-8") as fh:
                rec = json.load(fh)
            levels.setdefault(rec["p"], {}).update(rec)
    if fmt == "json":
        text = json.dumps([levels[p] for p in sorted(levels)], indent=1)
    else:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["p", "q", "dim"])
        for p in sorted(levels):
            for q, d in sorted(
                levels[p].get("dims", {}).items(), key=lambda kv: int(kv[0])
            ):
                writer.writerow([p, q, d])
        text = buf.getvalue().rstrip("\n")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


# ---------------------------------------------------------------------------
# verification suites


def run_verification(deep=False, echo=print):
    """Invariant suites at tiny levels (plus p=53 when deep). Returns failures."""
    import numpy as np

    from . import hecke as hk
    from . import modsym as ms
    from . import wspaces as ws
    from .projective import PrimeLevel

    q = 12379
    failures = []

    def check(name, fn):
        try:
            fn()
            echo(f"PASS {name}")
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures.append(name)
            echo(f"FAIL {name}: {exc}")

    def dims_identity():
        for p in (5, 7, 11, 13):
            lev = PrimeLevel(p)
            dW = ws.build_W_system(lev, q).nullity()
            dU = ws.build_U_system(lev, q).nullity()
            d0 = ws.build_W0_system(lev, q).nullity()
            assert dW == dU + 2 * d0, (p, dW, dU, d0)

    check("dim W = dim U + 2 dim W0 (p <= 13)", dims_identity)

    def reduction_properties():
        rng = np.random.default_rng(2024)
        lev = PrimeLevel(13)
        fs = ws.build_W_system(lev, q).kernel_functions()
        for _ in range(40):
            Q = rng.integers(-9, 10, (3, 3)).tolist()
            try:
                ms.normalize(Q)
            except ms.ZeroRowError:
                continue
            S1 = ms.reduce_to_unimodular(Q)
            S2 = ms.reduce_to_unimodular(Q, tie_break="max")
            Qs = [list(Q[0]), [2 * x for x in Q[1]], list(Q[2])]
            S3 = ms.reduce_to_unimodular(Qs)
            Qw = [list(Q[1]), list(Q[0]), list(Q[2])]
            S4 = ms.reduce_to_unimodular(Qw)
            for f in fs:
                v = ms.evaluate(S1, f)
                assert ms.evaluate(S2, f) == v
                assert ms.evaluate(S3, f) == v
                assert ms.evaluate(S4, f) == (-v) % q

    check("reduction path-independence / scaling / alternating", reduction_properties)

    def annihilation(p):
        lev = PrimeLevel(p)
        f0s = ws.build_W0_system(lev, q).kernel_functions()
        if not f0s:
            return
        rng = np.random.default_rng(p)
        for _ in range(100):
            x, y, z = (int(v) for v in rng.integers(1, p, 3))
            R = hk.make_R(x, y, z, lev)
            g = f0s[rng.integers(0, len(f0s))]
            gp = f0s[rng.integers(0, len(f0s))]
            f = ws.WFunction(
                (ws.apply_alpha(g).values + ws.apply_beta(gp).values) % q, lev, q
            )
            assert hk.pair(R, f) == 0

    check("annihilation pair(R, alpha g + beta g') = 0 (p=13)", lambda: annihilation(13))

    def coset_invariants():
        lev = PrimeLevel(13)
        for kind in ("E", "F"):
            for ell in (2, 3):
                reps = hk.coset_reps(hk.HeckeKind(kind, ell, lev))
                assert len(reps.mats) == ell * ell + ell + 1

    check("coset representative invariants (l=2,3)", coset_invariants)

    if deep:

        def deep_suite():
            lev = PrimeLevel(53)
            sysU = ws.build_U_system(lev, q)
            basis = sysU.kernel_functions()
            assert len(basis) == 2
            for f in basis:
                assert ws.is_in_U(f)
            annihilation(53)
            Rpair, P = hk.select_R_pair(basis)
            mats = {}
            for kind in ("E", "F"):
                for ell in (2, 3):
                    k = hk.HeckeKind(kind, ell, lev)
                    mats[(kind, ell)] = hk.hecke_matrix(k, basis, Rpair, P).mat
            items = list(mats.values())
            for i in range(len(items)):
                for j in range(i + 1, len(items)):
                    assert np.array_equal(
                        items[i] @ items[j] % q, items[j] @ items[i] % q
                    )

        check("deep suite at p=53 (dims, annihilation, commutativity)", deep_suite)

    return failures


if __name__ == "__main__":
    main()
