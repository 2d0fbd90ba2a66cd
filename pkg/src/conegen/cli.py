"""Command-line driver: generate, verify and report on instances.

``gen`` builds one or a batch of instances, verifies each one internally
(a failing verification aborts with exit 1 before any file is written),
then writes the family's canonical format plus any requested extras and a
manifest per instance.  ``verify`` re-checks manifest/instance pairs from
scratch.  ``report`` renders a CSV summary and PNG figures.  Identical
argv produces byte-identical output files.

Exit codes: 0 success, 1 generation/verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import instance_io, report as report_mod
from .certify import verify_lo, verify_sdo, verify_soco
from .controls import GenControls
from .lo_gen import gen_lo_both, gen_lo_interior, gen_lo_optimal
from .randkit import GenerationError
from .sdo_gen import (
    gen_sdo_block_both,
    gen_sdo_block_optimal,
    gen_sdo_eig_both,
    gen_sdo_eig_optimal,
    gen_sdo_interior,
    gen_sdo_maxcomp,
    gen_sdo_maxcomp_Bempty,
    gen_sdo_maxcomp_both,
)
from .soco_gen import (
    gen_soco_both,
    gen_soco_interior,
    gen_soco_maxcomp,
    gen_soco_maxcomp_both,
    gen_soco_optimal,
    random_maxcomp_partition,
)

OUT_ENV = "CONEGEN_OUT"

MODES = ("interior", "optimal", "both", "maxcomp", "maxcomp-both")
FORMATS = ("mps", "sdpa", "cbf", "manifest")
_FORMAT_FAMILY = {"mps": "lo", "sdpa": "sdo", "cbf": "soco"}

_VERIFIERS = {"lo": verify_lo, "sdo": verify_sdo, "soco": verify_soco}


class UsageError(ValueError):
    pass


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v != ""]


def _parse_str_list(text: str) -> list[str]:
    return [v for v in text.replace(" ", "").split(",") if v != ""]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conegen", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate instances with certified solutions")
    g.add_argument("family", choices=("lo", "sdo", "soco"))
    g.add_argument("--mode", choices=MODES, default=None)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--cone-dims", type=str, default=None, help="comma list, e.g. 3,1,4")
    g.add_argument("--nB", type=int, default=None)
    g.add_argument("--nN", type=int, default=None)
    g.add_argument(
        "--partition",
        type=str,
        default=None,
        help="lo: comma list of B indices; soco: comma list of per-cone labels",
    )
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--mu", type=float, default=None)
    g.add_argument("--sparsity", type=float, default=None)
    g.add_argument("--cond", type=float, default=None)
    g.add_argument("--norm-b", type=float, default=None)
    g.add_argument("--norm-c", type=float, default=None)
    g.add_argument("--batch", type=int, default=None)
    g.add_argument("--out", type=str, default=None)
    g.add_argument("--format", type=str, default=None, help="comma list from mps,sdpa,cbf,manifest")
    g.add_argument("--structure", choices=("block", "eig"), default=None, help="sdo solution structure")
    g.add_argument("--diagonal", action="store_true", help="sdo interior: diagonal pair")
    g.add_argument("--non-strict", action="store_true", help="lo optimal: allow zero entries on the support")
    g.add_argument("--config", type=str, default=None, help="JSON config; flags override its values")

    v = sub.add_parser("verify", help="re-check manifest/instance pairs")
    v.add_argument("manifests", nargs="+")

    r = sub.add_parser("report", help="CSV summary plus rendered figures")
    r.add_argument("inputs", nargs="+", help="manifest files or directories containing them")
    r.add_argument("--out", type=str, default=None, help="report directory")
    return p


def _merged_config(args) -> dict:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg.update(json.load(fh))
    for key in (
        "mode",
        "m",
        "n",
        "nB",
        "nN",
        "partition",
        "seed",
        "mu",
        "sparsity",
        "cond",
        "batch",
        "out",
        "structure",
    ):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.cone_dims is not None:
        cfg["cone_dims"] = _parse_int_list(args.cone_dims)
    if args.norm_b is not None:
        cfg["norm_b"] = args.norm_b
    if args.norm_c is not None:
        cfg["norm_c"] = args.norm_c
    if args.format is not None:
        cfg["format"] = _parse_str_list(args.format)
    if args.diagonal:
        cfg["diagonal"] = True
    if args.non_strict:
        cfg["strict"] = False
    cfg["family"] = args.family
    cfg.setdefault("mode", "interior")
    cfg.setdefault("seed", 0)
    cfg.setdefault("batch", 1)
    cfg.setdefault("structure", "block")
    cfg.setdefault("strict", True)
    cfg.setdefault("format", [])
    cfg.setdefault("out", os.environ.get(OUT_ENV, "."))
    return cfg


def _check_gen_config(cfg) -> None:
    family, mode = cfg["family"], cfg["mode"]
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    if family == "lo" and mode in ("maxcomp", "maxcomp-both"):
        raise UsageError(f"mode {mode} requires family sdo or soco")
    if int(cfg["batch"]) < 1:
        raise UsageError("batch must be >= 1")
    for fmt in cfg["format"]:
        if fmt not in FORMATS:
            raise UsageError(f"unknown format {fmt!r}")
        if fmt != "manifest" and _FORMAT_FAMILY[fmt] != family:
            raise UsageError(f"format {fmt} does not apply to family {family}")
    if family == "soco":
        if not cfg.get("cone_dims"):
            raise UsageError("soco generation requires --cone-dims")
    else:
        if cfg.get("n") is None:
            raise UsageError(f"{family} generation requires --n")
    if cfg.get("m") is None:
        raise UsageError("generation requires --m")
    if cfg.get("mu") is not None and mode != "interior":
        raise UsageError("--mu applies to interior mode only")


def _lo_partition(cfg):
    part = cfg.get("partition")
    if part is None:
        return None
    B = _parse_int_list(part) if isinstance(part, str) else [int(i) for i in part]
    n = int(cfg["n"])
    N = [i for i in range(n) if i not in set(B)]
    return (B, N)


def _soco_partition(cfg):
    part = cfg.get("partition")
    if part is None:
        return None
    return tuple(_parse_str_list(part) if isinstance(part, str) else part)


def generate_one(cfg, controls: GenControls):
    family, mode = cfg["family"], cfg["mode"]
    m = int(cfg["m"])
    if family == "lo":
        n = int(cfg["n"])
        if mode == "interior":
            return gen_lo_interior(m, n, controls, mu=cfg.get("mu"))
        if mode == "optimal":
            return gen_lo_optimal(m, n, _lo_partition(cfg), controls, strict=cfg["strict"])
        return gen_lo_both(m, n, _lo_partition(cfg), controls)
    if family == "sdo":
        n = int(cfg["n"])
        if mode == "interior":
            return gen_sdo_interior(m, n, controls, mu=cfg.get("mu"), diagonal_mode=cfg.get("diagonal", False))
        n_B = cfg.get("nB")
        n_N = cfg.get("nN")
        if n_B is None or n_N is None:
            raise UsageError(f"sdo mode {mode} requires --nB and --nN")
        n_B, n_N = int(n_B), int(n_N)
        if mode == "optimal":
            gen = gen_sdo_block_optimal if cfg["structure"] == "block" else gen_sdo_eig_optimal
            return gen(m, n, n_B, n_N, controls)
        if mode == "both":
            gen = gen_sdo_block_both if cfg["structure"] == "block" else gen_sdo_eig_both
            return gen(m, n, n_B, n_N, controls)
        if mode == "maxcomp":
            if n_B == 0:
                return gen_sdo_maxcomp_Bempty(m, n, n_N, controls)
            return gen_sdo_maxcomp(m, n, n_B, n_N, controls)
        return gen_sdo_maxcomp_both(m, n, n_B, n_N, controls)
    # soco
    cone_dims = tuple(int(d) for d in cfg["cone_dims"])
    partition = _soco_partition(cfg)
    if mode == "interior":
        return gen_soco_interior(m, cone_dims, controls)
    if mode == "optimal":
        return gen_soco_optimal(m, cone_dims, partition, controls)
    if mode == "both":
        return gen_soco_both(m, cone_dims, partition, controls)
    if partition is None:
        partition = random_maxcomp_partition(
            m, cone_dims, controls.stream().child(7), last_n=mode == "maxcomp-both"
        )
    if mode == "maxcomp":
        return gen_soco_maxcomp(m, cone_dims, partition, controls)
    return gen_soco_maxcomp_both(m, cone_dims, partition, controls)


def _cmd_gen(args) -> int:
    cfg = _merged_config(args)
    _check_gen_config(cfg)
    family, mode, seed = cfg["family"], cfg["mode"], int(cfg["seed"])
    batch = int(cfg["batch"])
    controls_base = dict(
        seed=seed,
        density=cfg.get("sparsity"),
        cond=cfg.get("cond"),
        norm_b=cfg.get("norm_b"),
        norm_c=cfg.get("norm_c"),
    )

    results = []
    for k in range(batch):
        controls = GenControls(stream_id=k, **controls_base)
        inst, cert = generate_one(cfg, controls)
        rep = _VERIFIERS[family](inst, cert)
        if not rep.passed:
            failing = [name for name, ok in {**rep.checks, **rep.structural_checks}.items() if not ok]
            print(f"internal verification failed for instance {k}: {', '.join(failing)}", file=sys.stderr)
            return 1
        results.append((k, inst, cert, rep, controls))

    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt_name, writer, suffix = instance_io.canonical_writer(family)
    for k, inst, cert, rep, controls in results:
        base = f"{family}_{mode.replace('-', '_')}_s{seed}_i{k:04d}"
        instance_path = writer(inst, out_dir / f"{base}{suffix}")
        manifest_path = instance_io.write_manifest(
            inst,
            cert,
            rep,
            out_dir / f"{base}.manifest.json",
            instance_path,
            seed=seed,
            stream_id=k,
            controls={**controls.to_dict(), "mode": mode, "family": family},
            mode=mode,
        )
        print(
            f"{base}: PASS primal={rep.primal_residual:.2e} dual={rep.dual_residual:.2e} "
            f"gap={rep.complementarity_gap:.2e} -> {instance_path.name}, {manifest_path.name}"
        )
    return 0


def _cmd_verify(args) -> int:
    status = 0
    for mpath in args.manifests:
        try:
            ref, cert, _ = instance_io.read_manifest(mpath)
            inst = instance_io.load_instance(ref)
            rep = _VERIFIERS[ref.family](inst, cert)
        except (instance_io.ManifestError, instance_io.IntegrityError, ValueError) as e:
            print(f"{mpath}: FAIL ({e})")
            status = 1
            continue
        if rep.passed:
            print(f"{mpath}: PASS primal={rep.primal_residual:.2e} dual={rep.dual_residual:.2e}")
        else:
            failing = [name for name, ok in {**rep.checks, **rep.structural_checks}.items() if not ok]
            print(f"{mpath}: FAIL ({', '.join(failing)})")
            status = 1
    return status


def _collect_manifests(inputs) -> list[Path]:
    found: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            found.extend(sorted(p.glob("*.manifest.json")))
        else:
            found.append(p)
    return found


def _cmd_report(args) -> int:
    manifests = _collect_manifests(args.inputs)
    if not manifests:
        print("no manifests found", file=sys.stderr)
        return 1
    out_dir = Path(args.out or os.environ.get(OUT_ENV, "."))
    result = report_mod.write_report(manifests, out_dir)
    print(f"wrote {result['csv']}")
    for fig in result["figures"]:
        print(f"wrote {fig}")
    return 0 if result["all_passed"] else 1


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_report(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, GenerationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
