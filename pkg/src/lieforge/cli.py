"""Command-line front end.

Exit status: 0 when the report was produced (and its verdict, if any,
passed), 1 when a verdict failed, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._config import RANK_TOL, dense_qubit_limit
from .errors import LieforgeError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    rank_tol: float = RANK_TOL
    seed: int = 0
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.rank_tol <= 0:
            raise ValueError("rank_tol must be positive")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _tolerances(cfg: RunConfig, **extra) -> dict:
    tol = {"rank_tol": cfg.rank_tol, "dense_qubit_limit": dense_qubit_limit()}
    tol.update(extra)
    return tol


# -- subcommands ---------------------------------------------------------------

def _run_closure(cfg: RunConfig) -> tuple[dict, int]:
    from .closure import dense_closure, is_cyclic, pauli_closure
    from .generators import load_generators

    gens = load_generators(cfg.options["inp"])
    if gens.is_pauli_strings and not cfg.options.get("dense"):
        basis = pauli_closure(gens)
    else:
        basis = dense_closure(gens, rank_tol=cfg.rank_tol)
    report = basis.to_dict()
    report["generators"] = list(gens.names)
    if basis.flavor == "dense" and basis.saturated:
        report["note"] = "full su(d)" if basis.dim == basis.matrix_dim ** 2 - 1 else "full u(d)"
    depth = cfg.options.get("cyclic_depth")
    if depth is not None:
        report["cyclicity"] = is_cyclic(gens, depth_budget=depth).to_dict()
    report["tolerances"] = _tolerances(cfg)
    return report, EXIT_OK


def _run_compose(cfg: RunConfig) -> tuple[dict, int]:
    from .composition import compose_powers, compose_projectors, verify_composition
    from .generators import load_generators, load_matrix

    blocks = [load_generators(p) for p in cfg.options["blocks"]]
    chi = load_matrix(cfg.options["chi"]) if cfg.options.get("chi") else None
    powers = cfg.options.get("powers")
    if powers:
        if len(blocks) != 1:
            raise LieforgeError("--powers takes exactly one block")
        if chi is None:
            from .composition import default_chi

            chi = default_chi(powers)
        composed = compose_powers(blocks[0], chi, powers)
        sets = blocks * powers
    else:
        composed = compose_projectors(blocks, chi)
        sets = blocks
    rep = verify_composition(sets, composed, rank_tol=cfg.rank_tol)
    report = rep.to_dict()
    report["mode"] = "powers" if powers else "projectors"
    report["composed_generators"] = list(composed.names)
    report["tolerances"] = _tolerances(cfg, **rep.tolerances)
    if cfg.options.get("out_gens"):
        Path(cfg.options["out_gens"]).write_text(dumps(composed.to_json_dict()))
    return report, EXIT_OK if rep.verdict == "pass" else EXIT_FAIL


def _run_invariance(cfg: RunConfig) -> tuple[dict, int]:
    from .closure import pauli_closure
    from .invariance import build_suN_generators

    variants = ["B_I", "B_II"] if cfg.options.get("variant", "both") == "both" else [cfg.options["variant"]]
    rows, ok = [], True
    for N in cfg.options["n_list"]:
        for v in variants:
            gens = build_suN_generators(N, v)
            dim = pauli_closure(gens).dim
            passed = len(gens) == 2 * N + 1 and dim == 4 ** N - 1
            ok &= passed
            rows.append({"N": N, "variant": v, "n_generators": len(gens), "generators": gens.to_text().split("\n")[1:-1],
                         "closure_dim": dim, "expected_dim": 4 ** N - 1, "pass": passed})
    report = {"results": rows, "verdict": "pass" if ok else "fail", "tolerances": _tolerances(cfg)}
    return report, EXIT_OK if ok else EXIT_FAIL


def _run_overlap(cfg: RunConfig) -> tuple[dict, int]:
    from .generators import load_generators
    from .invariance import central_spin_example, projection_overlap

    if cfg.options.get("example") == "central-spin":
        report = central_spin_example(J2=cfg.options.get("j2", 1.0), rank_tol=cfg.rank_tol)
    else:
        if not cfg.options.get("p") or not cfg.options.get("q"):
            raise LieforgeError("overlap needs --p and --q (or --example central-spin)")
        P = load_generators(cfg.options["p"])
        Q = load_generators(cfg.options["q"])
        report = projection_overlap(P, Q, rank_tol=cfg.rank_tol).to_dict()
    report["tolerances"] = _tolerances(cfg)
    return report, EXIT_OK


def _run_reduce(cfg: RunConfig) -> tuple[dict, int]:
    from .closure import closure, is_cyclic
    from .generators import load_generators
    from .reduction import build_filter, filter_from_operator, ideal_decomposition, oscillator_example, verify_reduction

    if cfg.options.get("modes"):
        res = oscillator_example(d_trunc=cfg.options["d_trunc"], mode_count=cfg.options["mode_count"],
                                 S=cfg.options["modes"], seed=cfg.seed, rank_tol=cfg.rank_tol)
        a_prime = res.pop("a_prime")
        report = res
        verdict = res["reduction"]["verdict"]
    else:
        if not cfg.options.get("inp"):
            raise LieforgeError("reduce needs --in (or --modes)")
        A = load_generators(cfg.options["inp"])
        basis = closure(A, cfg.rank_tol)
        dec = ideal_decomposition(basis, seed=cfg.seed, rank_tol=cfg.rank_tol)
        if cfg.options.get("filter"):
            fset = load_generators(cfg.options["filter"])
            if len(fset) != 1:
                raise LieforgeError("the filter file must hold exactly one generator")
            filt = filter_from_operator(dec, fset.dense()[0])
            targets = filt.target_indices
        else:
            targets = cfg.options.get("targets")
            if not targets:
                raise LieforgeError("give --targets or --filter")
            filt = build_filter(dec, targets, seed=cfg.seed)
        rep, a_prime = verify_reduction(A, filt, dec, targets, rank_tol=cfg.rank_tol)
        report = {"decomposition": dec.to_dict(), "filter": filt.to_dict(), "reduction": rep.to_dict(),
                  "a_prime_names": list(a_prime.names)}
        depth = cfg.options.get("cyclic_depth")
        if depth is not None:
            report["cyclicity"] = is_cyclic(A, depth_budget=depth).to_dict()
        verdict = rep.verdict
    report["tolerances"] = _tolerances(cfg)
    report["seed"] = cfg.seed
    if cfg.options.get("out_gens"):
        Path(cfg.options["out_gens"]).write_text(dumps(a_prime.to_json_dict()))
    return report, EXIT_OK if verdict == "pass" else EXIT_FAIL


def _run_trotter(cfg: RunConfig) -> tuple[dict | str, int]:
    from .trotter import dla_dims, error_sweep, exactness_residuals

    o = cfg.options
    if o.get("dims"):
        rows = dla_dims(o["n_list"])
        if cfg.format == "csv":
            cols = ["n", "dim_tfim", "n_squared", "matches_n_squared", "dim_ltfim"]
            lines = [",".join(cols)] + [",".join(str(r[c]) for c in cols) for r in rows]
            return "\n".join(lines) + "\n", EXIT_OK
        return {"dims": rows, "tolerances": _tolerances(cfg)}, EXIT_OK
    rep = error_sweep(o["n_list"], o["alpha_list"], o["t_list"], h_zz=o["hzz"], h_x=o["hx"],
                      with_bound=not o.get("no_bound"))
    if o.get("csv"):
        Path(o["csv"]).write_text(rep.to_csv())
    if cfg.format == "csv":
        return rep.to_csv(), EXIT_OK
    report = rep.to_dict()
    report["exactness"] = exactness_residuals(n=min(o["n_list"]), h_zz=o["hzz"], h_x=o["hx"])
    report["tolerances"] = _tolerances(cfg, **rep.tolerances)
    return report, EXIT_OK


DISPATCH = {
    "closure": _run_closure,
    "compose": _run_compose,
    "invariance": _run_invariance,
    "overlap": _run_overlap,
    "reduce": _run_reduce,
    "trotter": _run_trotter,
}


def run(cfg: RunConfig) -> int:
    """Dispatch, write the report, and return the exit status."""
    try:
        report, status = DISPATCH[cfg.subcommand](cfg)
    except (LieforgeError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    if cfg.format == "csv" and not isinstance(report, str):
        sys.stderr.write("error: csv output is only available for grid-shaped reports (trotter)\n")
        return EXIT_INPUT
    _emit(report if isinstance(report, str) else dumps(report), cfg.out)
    return status


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    common.add_argument("--rank-tol", type=float, default=RANK_TOL, help="relative rank tolerance")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    p = argparse.ArgumentParser(prog="lieforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lieforge {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("closure", parents=[common], help="Lie closure of a generator file")
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--dense", action="store_true", help="force the numerical path")
    c.add_argument("--cyclic-depth", type=int, default=None, help="also run the cyclicity search")

    c = sub.add_parser("compose", parents=[common], help="direct-sum composition of generator sets")
    c.add_argument("--blocks", nargs="+", required=True)
    c.add_argument("--chi", help="JSON matrix file for the ancilla label operator")
    c.add_argument("--powers", type=int, default=None, help="K copies of a single block via chi powers")
    c.add_argument("--out-gens", help="write the composed generators (JSON) here")

    c = sub.add_parser("invariance", parents=[common], help="minimal su(2^N) generating sets")
    c.add_argument("--n-list", type=_ints, default=[2, 3, 4, 5])
    c.add_argument("--variant", choices=["B_I", "B_II", "both"], default="both")

    c = sub.add_parser("overlap", parents=[common], help="central projections and overlap indices")
    c.add_argument("--p")
    c.add_argument("--q")
    c.add_argument("--example", choices=["central-spin"])
    c.add_argument("--j2", type=float, default=1.0)

    c = sub.add_parser("reduce", parents=[common], help="filter a generating set onto target ideals")
    c.add_argument("--in", dest="inp")
    c.add_argument("--targets", type=_ints, help="0-based ideal indices")
    c.add_argument("--filter", help="generator file holding a single filtering operator")
    c.add_argument("--modes", type=int, help="truncated-oscillator example: keep the first S modes")
    c.add_argument("--d-trunc", type=int, default=8)
    c.add_argument("--mode-count", type=int, default=2)
    c.add_argument("--cyclic-depth", type=int, default=None)
    c.add_argument("--out-gens", help="write the filtered generators (JSON) here")

    c = sub.add_parser("trotter", parents=[common], help="product-formula error sweep on Ising chains")
    c.add_argument("--n-list", type=_ints, default=[3])
    c.add_argument("--alpha-list", type=_floats, default=[0.05, 0.1, 0.2])
    c.add_argument("--t-list", type=_floats, default=list(np.geomspace(0.02, 0.32, 5)))
    c.add_argument("--hzz", type=float, default=1.0)
    c.add_argument("--hx", type=float, default=1.0)
    c.add_argument("--no-bound", action="store_true", help="skip the quadrature bound")
    c.add_argument("--csv", help="also write the grid as CSV here")
    c.add_argument("--dims", action="store_true", help="report closure dimensions vs n instead")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(args).items() if k not in ("subcommand", "out", "seed", "rank_tol", "format")}
    try:
        cfg = RunConfig(args.subcommand, opts, args.rank_tol, args.seed, args.out, args.format)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
