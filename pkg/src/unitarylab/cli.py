"""Command line front end.

Every command prints a JSON report (or writes it to --out) holding the command
echo, wall time, a results object and a provenance block.  Library errors map
to exit codes: 2 usage, 3 capacity, 4 contract violation, 5 non-convergence.
"""

from __future__ import annotations

import csv
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import __version__, ame, bell, chm, defect, kernels
from .errors import NonConvergence, UnitaryLabError, UsageError
from .numerics import DEFAULT_TOL, ToleranceConfig, load_matrix, matrix_to_json, save_matrix


@dataclass
class RunConfig:
    seed: int = 0
    tol: ToleranceConfig = DEFAULT_TOL
    out: str | None = None
    jobs: int | None = None
    data_dir: str | None = None
    argv: list = field(default_factory=list)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return [[float(z.real), float(z.imag)] for z in x.ravel()] if x.ndim == 1 else matrix_to_json(x)
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _emit(cfg: RunConfig, results: dict, started: float, seed_used: int | None = None):
    report = {
        "command": cfg.argv,
        "timing_s": round(time.perf_counter() - started, 6),
        "results": _jsonable(results),
        "provenance": {
            "version": __version__,
            "kernel_backend": kernels.BACKEND,
            "seed": cfg.seed if seed_used is None else seed_used,
            "tolerances": cfg.tol.to_dict(),
            "jobs": cfg.jobs,
        },
    }
    text = json.dumps(report, indent=2)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        click.echo(text)


def _parse_tol(ctx, param, values):
    """--tol 1e-9 sets unitarity_tol; --tol name=value sets any field."""
    kw = {}
    for v in values:
        if "=" in v:
            name, val = v.split("=", 1)
            if name not in DEFAULT_TOL.to_dict():
                raise click.BadParameter(f"unknown tolerance {name!r}")
            kw[name] = float(val)
        else:
            try:
                kw["unitarity_tol"] = float(v)
            except ValueError:
                raise click.BadParameter(f"not a number: {v!r}") from None
    try:
        return ToleranceConfig(**{**DEFAULT_TOL.to_dict(), **kw})
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="unitarylab")
@click.option("--tol", multiple=True, callback=_parse_tol, metavar="[NAME=]VALUE",
              help="Tolerance override; a bare number sets unitarity_tol.")
@click.option("--seed", type=int, default=0, show_default=True, help="Default RNG seed.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")
@click.option("--jobs", type=click.IntRange(1), default=None, help="Cap on BLAS worker threads.")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None, help="Dataset directory.")
@click.pass_context
def cli(ctx, tol, seed, out, jobs, data_dir):
    """Structured unitary matrices toolkit."""
    ctx.obj = RunConfig(seed, tol, out, jobs, data_dir, list(_ARGV))
    if jobs:
        from threadpoolctl import threadpool_limits
        ctx.with_resource(threadpool_limits(limits=jobs))


pass_cfg = click.make_pass_decorator(RunConfig)
_ARGV: list = []


# ------------------------------------------------------------------ chm

@cli.group("chm")
def chm_group():
    """Complex Hadamard matrices."""


@chm_group.command("gen")
@click.option("--method", type=click.Choice(["sinkhorn", "walk"]), default="sinkhorn", show_default=True)
@click.option("--n", "N", type=click.IntRange(2), required=True)
@click.option("--seed", type=int, default=None, help="Overrides the global seed.")
@click.option("--max-iters", type=click.IntRange(1), default=10_000, show_default=True)
@click.option("--save", type=click.Path(dir_okay=False), default=None, help="Write the matrix file.")
@pass_cfg
def chm_gen(cfg, method, N, seed, max_iters, save):
    t0 = time.perf_counter()
    seed = cfg.seed if seed is None else seed
    if method == "sinkhorn":
        cand = chm.sinkhorn_chm(N, rng_seed=seed, max_iters=max_iters, tol=cfg.tol)
    else:
        cand = chm.random_walk_chm(N, rng_seed=seed, tol=cfg.tol)
    if save and cand.converged:
        save_matrix(save, cand.matrix)
    res = {"method": method, "N": N, "converged": cand.converged, "Z": cand.deviation,
           "iterations": cand.iterations, "matrix": matrix_to_json(cand.matrix)}
    if not cand.converged:
        _emit(cfg, res, t0, seed)
        raise NonConvergence(f"{method} did not reach a Hadamard matrix (Z = {cand.deviation:.3e})")
    _emit(cfg, res, t0, seed)


@chm_group.command("cert")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@pass_cfg
def chm_cert(cfg, file):
    """Report is_chm, defect, Haagerup cardinality and Butson type."""
    t0 = time.perf_counter()
    H = load_matrix(file)
    ok = chm.is_chm(H, cfg.tol)
    res = {"N": H.shape[0], "is_chm": ok, "Z": chm.chm_deviation(H)}
    if ok:
        dr = chm.unitary_defect(H, cfg.tol)
        b = chm.butson_fit(H, tol=cfg.tol)
        res.update(defect=dr.defect, rank=dr.rank,
                   haagerup=chm.haagerup_card(H, cfg.tol).cardinality,
                   butson={"is_butson": b.is_butson, "q": b.q})
    _emit(cfg, res, t0)


@chm_group.command("catalogue")
@click.argument("name", type=click.Choice(chm.CATALOGUE_NAMES))
@click.option("--gamma", type=float, default=None, help="T6 parameter.")
@click.option("--n", "N", type=click.IntRange(2), default=None, help="Fourier order.")
@click.option("--save", type=click.Path(dir_okay=False), default=None)
@pass_cfg
def chm_catalogue(cfg, name, gamma, N, save):
    t0 = time.perf_counter()
    params = None
    if name == "T6" and gamma is not None:
        params = [gamma]
    elif name == "F" and N is not None:
        params = [N]
    H = chm.catalogue(name, params)
    if save:
        save_matrix(save, H)
    _emit(cfg, {"name": name, "params": params, "Z": chm.chm_deviation(H),
                "matrix": matrix_to_json(H)}, t0)


# --------------------------------------------------------------- defect

def _load_vectors_or_matrix(file):
    text = Path(file).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = None
    if isinstance(obj, dict) and "vectors" in obj:
        return defect.vectors_from_json(obj), None
    return None, load_matrix(file)


def _defect_dict(r):
    return {"tau": r.tau, "f": r.f, "z": r.z, "r": r.r, "delta": r.delta, "sigma1": r.sigma1}


@cli.group("defect")
def defect_group():
    """Restricted defect of measurement Gram matrices."""


@defect_group.command("gram")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@pass_cfg
def defect_gram(cfg, file):
    t0 = time.perf_counter()
    P = defect.dataset_load(file)
    G = defect.gram_from_vectors(P)
    _emit(cfg, {"N": P.N, "d": P.d, "valid_povm_gram": defect.is_valid_povm_gram(G, P.N, P.d),
                "gram": matrix_to_json(G.G)}, t0)


@defect_group.command("delta")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@pass_cfg
def defect_delta(cfg, file):
    """FILE is a vector set or a Hermitian unitary matrix."""
    t0 = time.perf_counter()
    P, U = _load_vectors_or_matrix(file)
    if P is not None:
        r = defect.restricted_defect_of_vectors(P, cfg.tol)
        res = {"N": P.N, "d": P.d, **_defect_dict(r)}
    else:
        res = {"N": U.shape[0], **_defect_dict(defect.restricted_defect(U, cfg.tol))}
    _emit(cfg, res, t0)


@defect_group.command("mub")
@click.option("--p", "p", type=int, required=True)
@click.option("--m", "m", type=int, required=True)
@pass_cfg
def defect_mub(cfg, p, m):
    t0 = time.perf_counter()
    bases = defect.mub_prime(p)
    if not 1 <= m <= len(bases):
        raise UsageError(f"m must lie in 1..{len(bases)} for p = {p}")
    P = defect.mub_povm(bases[:m])
    _emit(cfg, {"p": p, "m": m, **_defect_dict(defect.restricted_defect_of_vectors(P, cfg.tol))}, t0)


@defect_group.command("etf")
@click.option("--k", "k", type=click.IntRange(2), required=True)
@pass_cfg
def defect_etf(cfg, k):
    t0 = time.perf_counter()
    F = defect.etf_hermitian_fourier(k)
    _emit(cfg, {"k": k, "N": k * k, **_defect_dict(defect.restricted_defect(F, cfg.tol))}, t0)


@defect_group.command("sic3")
@click.option("--gamma", type=float, required=True)
@pass_cfg
def defect_sic3(cfg, gamma):
    t0 = time.perf_counter()
    P = defect.sic_d3(gamma)
    _emit(cfg, {"gamma": gamma, **_defect_dict(defect.restricted_defect_of_vectors(P, cfg.tol))}, t0)


# ------------------------------------------------------------------ ame

@cli.group("ame")
def ame_group():
    """Entangling power, 2-unitarity and the dynamical map."""


@ame_group.command("epgt")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--d", "d", type=click.IntRange(2), default=None)
@pass_cfg
def ame_epgt(cfg, file, d):
    t0 = time.perf_counter()
    pt = ame.ep_gt(load_matrix(file), d, cfg.tol)
    _emit(cfg, {"e_p": pt.e_p, "g_t": pt.g_t}, t0)


@ame_group.command("verify")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--d", "d", type=click.IntRange(2), default=None)
@pass_cfg
def ame_verify(cfg, file, d):
    t0 = time.perf_counter()
    M = load_matrix(file)
    rep = ame.two_unitarity_report(M, d)
    rep["two_unitary"] = ame.is_two_unitary(M, cfg.tol.unitarity_tol, d)
    _emit(cfg, rep, t0)


@ame_group.command("golden")
@click.option("--out", "path", type=click.Path(dir_okay=False), default=None,
              help="Write the 36x36 matrix to this file.")
@pass_cfg
def ame_golden(cfg, path):
    t0 = time.perf_counter()
    A = ame.golden_ame()
    if path:
        save_matrix(path, A)
    res = {"nonzeros": int(np.count_nonzero(np.abs(A) > 1e-14)),
           "coefficients": ame.golden_coefficients(),
           "two_unitary": ame.is_two_unitary(A, cfg.tol.unitarity_tol, 6),
           "file": path}
    if not path:
        res["matrix"] = matrix_to_json(A)
    _emit(cfg, res, t0)


@ame_group.command("run")
@click.option("--seed-perm", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Permutation matrix to perturb; omit for a Haar-random start.")
@click.option("--d", "d", type=click.IntRange(2), default=None, help="Local dimension for a Haar start.")
@click.option("--eps", type=float, default=0.05, show_default=True)
@click.option("--rng", type=int, default=None, help="Seed; defaults to the global --seed.")
@click.option("--max-iters", type=click.IntRange(0), default=10_000, show_default=True)
@click.option("--trajectory", type=click.Path(dir_okay=False), default=None, help="CSV of iter,e_p,g_t.")
@pass_cfg
def ame_run(cfg, seed_perm, d, eps, rng, max_iters, trajectory):
    t0 = time.perf_counter()
    seed = cfg.seed if rng is None else rng
    if seed_perm:
        M0 = ame.seed_m0(load_matrix(seed_perm), eps, seed)
    elif d:
        from .numerics import haar_unitary
        M0 = haar_unitary(d * d, np.random.default_rng(seed))
    else:
        raise UsageError("give --seed-perm FILE or --d D")
    rec = ame.dynamical_map_run(M0, max_iters=max_iters, tol=cfg.tol.unitarity_tol)
    if trajectory:
        with open(trajectory, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "e_p", "g_t"])
            for i, pt in enumerate(rec.trajectory):
                w.writerow([i, repr(pt.e_p), repr(pt.g_t)])
    last = rec.trajectory[-1]
    _emit(cfg, {"outcome": rec.outcome, "iterations": rec.iterations, "eps": eps,
                "final_e_p": last.e_p, "final_g_t": last.g_t, "trajectory": trajectory}, t0, seed)
    if rec.outcome != "two_unitary":
        raise NonConvergence(f"map ended in state {rec.outcome!r}")


@ame_group.command("sample")
@click.option("--d", "d", type=click.IntRange(2), required=True)
@click.option("--n", "n", type=click.IntRange(1), required=True)
@click.option("--out", "path", type=click.Path(dir_okay=False), default=None, help="CSV of e_p,g_t.")
@pass_cfg
def ame_sample(cfg, d, n, path):
    t0 = time.perf_counter()
    pts = ame.ep_gt_sample(d, n, cfg.seed)
    if path:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["e_p", "g_t"])
            for pt in pts:
                w.writerow([repr(pt.e_p), repr(pt.g_t)])
    ep = np.array([p.e_p for p in pts])
    gt = np.array([p.g_t for p in pts])
    _emit(cfg, {"d": d, "n": n, "mean_e_p": ep.mean(), "mean_g_t": gt.mean(), "csv": path}, t0)


# ----------------------------------------------------------------- bell

@cli.group("bell")
def bell_group():
    """Classical values, bounds and tightness of Bell expressions."""


def _real_if_possible(M):
    return M.real.copy() if np.max(np.abs(M.imag)) == 0 else M


@bell_group.command("lhv")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", "q", type=click.IntRange(2), default=2, show_default=True)
@click.option("--m", "m", type=click.IntRange(2), default=None,
              help="Give m to treat FILE as a full order-qm correlation matrix.")
@pass_cfg
def bell_lhv(cfg, file, q, m):
    """Without --m and q = 2, FILE is a real core."""
    t0 = time.perf_counter()
    M = _real_if_possible(load_matrix(file))
    if m is not None and M.shape[0] != q * m:
        raise UsageError(f"matrix order {M.shape[0]} differs from q*m = {q * m}")
    full = m is not None or q != 2
    res = bell.lhv_value(M, q, m if full else None)
    if full:
        wit = {"a": res.x, "b": res.y}
        bnd = bell.bounds(bell.maximal_excess_form(M, q))
    else:
        wit = {"x": res.x, "y": res.y}
        bnd = bell.bounds(bell.maximal_excess_form(bell.full_from_core(M), 2))
    _emit(cfg, {"classical": res.value, "bounds": bnd, "witnesses": wit}, t0)


@bell_group.command("bounds")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", "q", type=click.IntRange(2), default=None,
              help="Bring FILE to maximal excess form under q-equivalence first.")
@pass_cfg
def bell_bounds(cfg, file, q):
    """Bounds of the full correlation matrix in FILE."""
    t0 = time.perf_counter()
    M = _real_if_possible(load_matrix(file))
    if q is not None:
        M = bell.maximal_excess_form(M, q)
    _emit(cfg, {"bounds": bell.bounds(M), "maximal_form": q is not None}, t0)


@bell_group.command("circulant")
@click.option("--n", "n", type=click.IntRange(3), required=True)
@pass_cfg
def bell_circulant(cfg, n):
    t0 = time.perf_counter()
    M = bell.circulant_bell(n)
    classical = bell.lhv_value(M).value
    alpha, beta = bell.optimal_phases(n)
    op = bell.qubit_bell_operator(M, alpha, beta)
    quantum = bell.circulant_quantum_value(n)
    _emit(cfg, {"n": n, "classical": classical, "quantum": quantum,
                "ratio": quantum / classical, "operator_max_eigenvalue": op.largest_eigenvalue,
                "witnesses": {"alpha": alpha, "beta": beta}}, t0)


@bell_group.command("tight")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@pass_cfg
def bell_tight(cfg, file):
    t0 = time.perf_counter()
    r = bell.tightness(load_matrix(file).real)
    _emit(cfg, {"classical": r.classical_value, "vertices": r.vertex_count,
                "affine_rank": r.affine_rank, "tight": r.is_tight}, t0)


@bell_group.command("unbiased")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@pass_cfg
def bell_unbiased(cfg, file):
    t0 = time.perf_counter()
    X = bell.unbiased_vectors(load_matrix(file).real)
    _emit(cfg, {"count": int(X.shape[0]), "vectors": X}, t0)


# ------------------------------------------------------------- datasets

def default_data_dir() -> Path:
    return Path(str(resources.files("unitarylab") / "data"))


def dataset_list(directory) -> list[dict]:
    """Inventory of vector-set files; checksums are compared with manifest.json when present."""
    directory = Path(directory)
    if not directory.is_dir():
        raise UsageError(f"dataset directory {directory} does not exist")
    manifest = {}
    mpath = directory / "manifest.json"
    if mpath.exists():
        manifest = json.loads(mpath.read_text())
    out = []
    for path in sorted(directory.glob("*.json")):
        if path.name == "manifest.json":
            continue
        entry = {"name": path.stem, "file": path.name, "sha256": defect.file_checksum(path)}
        try:
            P = defect.dataset_load(path)
            entry.update(d=P.d, N=P.N)
        except (UnitaryLabError, ValueError) as exc:
            entry.update(d=None, N=None, error=str(exc))
        expected = manifest.get(path.stem, {}).get("sha256")
        if expected is None:
            entry["status"] = "unlisted"
        elif expected != entry["sha256"]:
            entry["status"] = "checksum_mismatch"
        else:
            entry["status"] = "ok"
        if "error" in entry and entry["status"] == "ok":
            entry["status"] = "unreadable"
        out.append(entry)
    return out


@cli.command("datasets")
@pass_cfg
def datasets_cmd(cfg):
    """List bundled (or --data-dir) vector sets with checksums."""
    t0 = time.perf_counter()
    directory = Path(cfg.data_dir) if cfg.data_dir else default_data_dir()
    _emit(cfg, {"directory": str(directory), "datasets": dataset_list(directory)}, t0)


# ------------------------------------------------------------------ entry

def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _ARGV[:] = argv
    try:
        cli.main(args=argv, prog_name="unitarylab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 2
    except UnitaryLabError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
