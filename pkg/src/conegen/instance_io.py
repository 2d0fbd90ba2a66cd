"""Serialization: MPS / SDPA sparse / CBF writers with round-trip readers,
plus a JSON manifest carrying the certificate at full precision.

Writers are pure functions of the data, so identical inputs produce
byte-identical files.  Text formats carry 17 significant digits, which is
enough to reproduce every double exactly on parse-back.  The manifest
encodes all solution numerics as hex floats (bit-exact round trip) and
references the instance file by its SHA-256 content hash; readers refuse
manifests whose hash no longer matches.  Certificates live only in the
manifest, never in the solver-facing formats.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from .certify import VerifyReport
from .lo_gen import LinearInstance, LoCertificate
from .sdo_gen import SdoCertificate, SdoInstance
from .soco_gen import SocoCertificate, SocoInstance

FORMAT_VERSION = "1"

CANONICAL_SUFFIX = {"lo": ".mps", "sdo": ".dat-s", "soco": ".cbf"}


class ManifestError(ValueError):
    """Manifest violates the schema or cannot be parsed."""


class IntegrityError(RuntimeError):
    """Manifest hash does not match the instance file bytes."""


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


# ---------------------------------------------------------------------------
# MPS (linear instances)

def write_lo_mps(instance: LinearInstance, path) -> Path:
    """Fixed-layout MPS with ROWS/COLUMNS/RHS/BOUNDS sections.

    The objective row is named COST; equality rows are E-typed.  Numeric
    fields are free-form with 17 significant digits.  Zero right-hand
    sides are omitted from RHS (the standard omitted-zero convention);
    every column appears at least through its COST entry.  Variables keep
    the default nonnegative bounds, so BOUNDS is present but empty.
    """
    A, b, c = instance.A, instance.b, instance.c
    m, n = A.shape
    row = [f"R{i + 1:07d}" for i in range(m)]
    col = [f"X{j + 1:07d}" for j in range(n)]
    lines = ["NAME          CONEGEN", "ROWS", " N  COST"]
    lines += [f" E  {r}" for r in row]
    lines.append("COLUMNS")
    for j in range(n):
        entries = [("COST", c[j])]
        entries += [(row[i], A[i, j]) for i in range(m) if A[i, j] != 0.0]
        for k in range(0, len(entries), 2):
            chunk = entries[k : k + 2]
            parts = [f"    {col[j]:<10}"]
            for name, val in chunk:
                parts.append(f"{name:<10}{_fmt(val):<25}")
            lines.append("".join(parts).rstrip())
    lines.append("RHS")
    rhs_entries = [(row[i], b[i]) for i in range(m) if b[i] != 0.0]
    for k in range(0, len(rhs_entries), 2):
        chunk = rhs_entries[k : k + 2]
        parts = ["    RHS       "]
        for name, val in chunk:
            parts.append(f"{name:<10}{_fmt(val):<25}")
        lines.append("".join(parts).rstrip())
    lines.append("BOUNDS")
    lines.append("ENDATA")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_lo_mps(path) -> LinearInstance:
    """Round-trip reader for files produced by :func:`write_lo_mps`."""
    section = None
    rows: list[str] = []
    col_entries: dict[str, list[tuple[str, float]]] = {}
    col_order: list[str] = []
    rhs: dict[str, float] = {}
    for raw in Path(path).read_text().splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" ") and not raw.startswith("\t"):
            section = raw.split()[0]
            continue
        tok = raw.split()
        if section == "ROWS":
            if tok[0] == "E":
                rows.append(tok[1])
        elif section == "COLUMNS":
            name = tok[0]
            if name not in col_entries:
                col_entries[name] = []
                col_order.append(name)
            for k in range(1, len(tok), 2):
                col_entries[name].append((tok[k], float(tok[k + 1])))
        elif section == "RHS":
            for k in range(1, len(tok), 2):
                rhs[tok[k]] = float(tok[k + 1])
    m, n = len(rows), len(col_order)
    row_index = {r: i for i, r in enumerate(rows)}
    A = np.zeros((m, n))
    c = np.zeros(n)
    for j, name in enumerate(col_order):
        for rname, val in col_entries[name]:
            if rname == "COST":
                c[j] = val
            else:
                A[row_index[rname], j] = val
    b = np.array([rhs.get(r, 0.0) for r in rows])
    return LinearInstance(A, b, c)


# ---------------------------------------------------------------------------
# SDPA sparse (semidefinite instances)

def write_sdo_sdpa(instance: SdoInstance, path) -> Path:
    """SDPA sparse format (.dat-s): one block of order n.

    Header lines carry m, the block count (1), the block size and the
    right-hand side; data lines are "matno block i j value" with 1-based
    upper-triangle indices, matrix 0 being the cost matrix and 1..m the
    constraints.  Entries are sorted by (matno, i, j); exact zeros are
    skipped, so an all-zero matrix contributes no lines.
    """
    A, b, C = instance.A, instance.b, instance.C
    m, n = instance.m, instance.n
    lines = [str(m), "1", str(n), " ".join(_fmt(v) for v in b)]
    mats = [C, *A]
    for matno, M in enumerate(mats):
        for i in range(n):
            for j in range(i, n):
                if M[i, j] != 0.0:
                    lines.append(f"{matno} 1 {i + 1} {j + 1} {_fmt(M[i, j])}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_sdo_sdpa(path) -> SdoInstance:
    """Round-trip reader for files produced by :func:`write_sdo_sdpa`."""
    lines = [
        ln
        for ln in Path(path).read_text().splitlines()
        if ln.strip() and ln[0] not in "*\""
    ]
    m = int(lines[0])
    nblocks = int(lines[1])
    if nblocks != 1:
        raise ValueError("only single-block files are produced/read")
    n = abs(int(lines[2].replace("{", " ").replace("}", " ").split()[0]))
    b = np.array([float(v) for v in lines[3].split()])
    mats = np.zeros((m + 1, n, n))
    for ln in lines[4:]:
        tok = ln.split()
        matno, _, i, j, val = int(tok[0]), int(tok[1]), int(tok[2]), int(tok[3]), float(tok[4])
        mats[matno, i - 1, j - 1] = val
        mats[matno, j - 1, i - 1] = val
    return SdoInstance(mats[1:], b, mats[0])


# ---------------------------------------------------------------------------
# CBF v2 (second-order cone instances)

def write_soco_cbf(instance: SocoInstance, path) -> Path:
    """Conic benchmark format v2.

    Variables live in the listed quadratic cones (1-dimensional cones are
    emitted as nonnegative-orthant entries); the equality block encodes
    Ax = b as scalar rows  sum_j a_ij x_j - b_i  in the zero domain, so
    BCOORD holds -b.  Indices are 0-based per the format.
    """
    A, b, c = instance.A, instance.b, instance.c
    m, n = instance.m, instance.n
    lines = ["VER", "2", "", "OBJSENSE", "MIN", "", "VAR"]
    lines.append(f"{n} {len(instance.cone_dims)}")
    for d in instance.cone_dims:
        lines.append(f"Q {d}" if d >= 2 else "L+ 1")
    lines += ["", "CON", f"{m} 1", f"L= {m}"]
    obj = [(j, c[j]) for j in range(n) if c[j] != 0.0]
    lines += ["", "OBJACOORD", str(len(obj))]
    lines += [f"{j} {_fmt(v)}" for j, v in obj]
    acoord = [
        (i, j, A[i, j]) for i in range(m) for j in range(n) if A[i, j] != 0.0
    ]
    lines += ["", "ACOORD", str(len(acoord))]
    lines += [f"{i} {j} {_fmt(v)}" for i, j, v in acoord]
    bcoord = [(i, -b[i]) for i in range(m) if b[i] != 0.0]
    lines += ["", "BCOORD", str(len(bcoord))]
    lines += [f"{i} {_fmt(v)}" for i, v in bcoord]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_soco_cbf(path) -> SocoInstance:
    """Round-trip reader for files produced by :func:`write_soco_cbf`."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    idx = 0

    def seek(keyword: str) -> int:
        nonlocal idx
        for k in range(len(lines)):
            if lines[k] == keyword:
                return k
        raise ValueError(f"missing section {keyword}")

    k = seek("VAR")
    n, ncones = (int(v) for v in lines[k + 1].split())
    cone_dims = []
    for row in lines[k + 2 : k + 2 + ncones]:
        kind, d = row.split()
        cone_dims.append(int(d))
    k = seek("CON")
    m = int(lines[k + 1].split()[0])
    c = np.zeros(n)
    k = seek("OBJACOORD")
    cnt = int(lines[k + 1])
    for row in lines[k + 2 : k + 2 + cnt]:
        j, v = row.split()
        c[int(j)] = float(v)
    A = np.zeros((m, n))
    k = seek("ACOORD")
    cnt = int(lines[k + 1])
    for row in lines[k + 2 : k + 2 + cnt]:
        i, j, v = row.split()
        A[int(i), int(j)] = float(v)
    b = np.zeros(m)
    k = seek("BCOORD")
    cnt = int(lines[k + 1])
    for row in lines[k + 2 : k + 2 + cnt]:
        i, v = row.split()
        b[int(i)] = -float(v)
    return SocoInstance(tuple(cone_dims), A, b, c)


# ---------------------------------------------------------------------------
# hex-float encoding

def encode_array(a) -> dict | None:
    if a is None:
        return None
    a = np.asarray(a, dtype=float)
    return {"shape": list(a.shape), "hex": [v.hex() for v in a.ravel().tolist()]}


def decode_array(d) -> np.ndarray | None:
    if d is None:
        return None
    flat = np.array([float.fromhex(h) for h in d["hex"]], dtype=float)
    return flat.reshape(d["shape"])


def _enc_scalar(v) -> str | None:
    return None if v is None else float(v).hex()


def _dec_scalar(v) -> float | None:
    return None if v is None else float.fromhex(v)


def _enc_triple(sol):
    if sol is None:
        return None
    return {"x": encode_array(sol[0]), "y": encode_array(sol[1]), "s": encode_array(sol[2])}


def _dec_triple(d):
    if d is None:
        return None
    return (decode_array(d["x"]), decode_array(d["y"]), decode_array(d["s"]))


def _enc_report(report: VerifyReport | None) -> dict | None:
    if report is None:
        return None
    d = report.to_dict()
    for key in ("primal_residual", "dual_residual", "complementarity_gap"):
        d[key] = float(d[key]).hex()
    d["cone_margins"] = {k: float(v).hex() for k, v in d["cone_margins"].items()}
    return d


def _dec_report(d) -> VerifyReport | None:
    if d is None:
        return None
    return VerifyReport(
        primal_residual=float.fromhex(d["primal_residual"]),
        dual_residual=float.fromhex(d["dual_residual"]),
        complementarity_gap=float.fromhex(d["complementarity_gap"]),
        cone_margins={k: float.fromhex(v) for k, v in d["cone_margins"].items()},
        structural_checks=dict(d["structural_checks"]),
        checks=dict(d["checks"]),
        passed=bool(d["passed"]),
        tolerances_used=dict(d["tolerances_used"]),
        notes=tuple(d["notes"]),
    )


def _family_of(instance) -> str:
    if isinstance(instance, LinearInstance):
        return "lo"
    if isinstance(instance, SdoInstance):
        return "sdo"
    if isinstance(instance, SocoInstance):
        return "soco"
    raise TypeError(f"unknown instance type {type(instance)!r}")


def cert_to_dict(cert) -> tuple[dict, dict, object]:
    """Split a certificate into (solutions+structure, flags, partition)."""
    if isinstance(cert, LoCertificate):
        body = {
            "interior": _enc_triple(cert.interior),
            "optimal": _enc_triple(cert.optimal),
            "mu": _enc_scalar(cert.mu),
            "scaling": {k: _enc_scalar(v) for k, v in cert.scaling.items()},
        }
        flags = {
            "strictly_complementary": cert.strictly_complementary,
            "unique_basis": cert.unique_basis,
        }
        partition = (
            None
            if cert.partition is None
            else {"B": cert.partition[0].tolist(), "N": cert.partition[1].tolist()}
        )
        return body, flags, partition
    if isinstance(cert, SdoCertificate):
        body = {
            "interior": _enc_triple(cert.interior),
            "optimal": _enc_triple(cert.optimal),
            "basis": encode_array(cert.basis),
            "gamma": encode_array(cert.gamma),
            "scaling": {k: _enc_scalar(v) for k, v in cert.scaling.items()},
        }
        flags = {
            "maximally_complementary": cert.maximally_complementary,
            "strictly_complementary": cert.strictly_complementary,
            "maxcomp_construction": cert.maxcomp_construction,
        }
        nb, nt, nn = cert.partition_dims
        return body, flags, {"n_B": nb, "n_T": nt, "n_N": nn}
    if isinstance(cert, SocoCertificate):
        body = {
            "interior": _enc_triple(cert.interior),
            "optimal": _enc_triple(cert.optimal),
            "r_scalars": {str(k): _enc_scalar(v) for k, v in cert.r_scalars.items()},
            "scaling": {k: _enc_scalar(v) for k, v in cert.scaling.items()},
        }
        flags = {"maximally_complementary": cert.maximally_complementary}
        partition = None if cert.partition is None else {"labels": list(cert.partition)}
        return body, flags, partition
    raise TypeError(f"unknown certificate type {type(cert)!r}")


def cert_from_dict(family: str, body: dict, flags: dict, partition):
    if family == "lo":
        part = None
        if partition is not None:
            part = (
                np.asarray(partition["B"], dtype=int),
                np.asarray(partition["N"], dtype=int),
            )
        return LoCertificate(
            interior=_dec_triple(body["interior"]),
            optimal=_dec_triple(body["optimal"]),
            partition=part,
            mu=_dec_scalar(body.get("mu")),
            strictly_complementary=flags.get("strictly_complementary", False),
            unique_basis=flags.get("unique_basis", False),
            scaling={k: _dec_scalar(v) for k, v in body.get("scaling", {}).items()},
        )
    if family == "sdo":
        dims = (partition["n_B"], partition["n_T"], partition["n_N"])
        return SdoCertificate(
            interior=_dec_triple(body["interior"]),
            optimal=_dec_triple(body["optimal"]),
            partition_dims=dims,
            basis=decode_array(body.get("basis")),
            gamma=decode_array(body.get("gamma")),
            maximally_complementary=flags.get("maximally_complementary", False),
            strictly_complementary=flags.get("strictly_complementary", False),
            maxcomp_construction=flags.get("maxcomp_construction", False),
            scaling={k: _dec_scalar(v) for k, v in body.get("scaling", {}).items()},
        )
    if family == "soco":
        return SocoCertificate(
            interior=_dec_triple(body["interior"]),
            optimal=_dec_triple(body["optimal"]),
            partition=None if partition is None else tuple(partition["labels"]),
            r_scalars={int(k): _dec_scalar(v) for k, v in body.get("r_scalars", {}).items()},
            maximally_complementary=flags.get("maximally_complementary", False),
            scaling={k: _dec_scalar(v) for k, v in body.get("scaling", {}).items()},
        )
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# manifest

MANIFEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "format_version",
        "family",
        "dimensions",
        "seed",
        "controls",
        "instance_file",
        "instance_sha256",
        "certificate",
        "flags",
        "verification",
    ],
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "family": {"enum": ["lo", "sdo", "soco"]},
        "mode": {"type": ["string", "null"]},
        "dimensions": {"type": "object"},
        "seed": {"type": "integer"},
        "stream_id": {"type": "integer"},
        "controls": {"type": "object"},
        "instance_file": {"type": "string"},
        "instance_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "certificate": {"type": "object"},
        "partition": {"type": ["object", "null"]},
        "flags": {"type": "object"},
        "verification": {"type": ["object", "null"]},
    },
}

_VALIDATOR = Draft202012Validator(MANIFEST_SCHEMA)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class InstanceRef:
    """Location, identity and provenance of a serialized instance."""

    family: str
    instance_path: Path
    sha256: str
    dimensions: dict
    seed: int
    stream_id: int
    controls: dict
    mode: str | None = None


def _dimensions_of(instance) -> dict:
    fam = _family_of(instance)
    if fam == "soco":
        return {"m": instance.m, "n": instance.n, "cone_dims": list(instance.cone_dims)}
    return {"m": instance.m, "n": instance.n}


def write_manifest(
    instance,
    cert,
    report: VerifyReport | None,
    path,
    instance_file,
    seed: int = 0,
    stream_id: int = 0,
    controls: dict | None = None,
    mode: str | None = None,
) -> Path:
    """Write the manifest for an already-exported instance file.

    The manifest echoes seed/controls, embeds the certificate with
    hex-float (bit-exact) numerics and references ``instance_file`` by its
    SHA-256 hash; only the file's base name is stored so output trees are
    relocatable.
    """
    body, flags, partition = cert_to_dict(cert)
    doc = {
        "format_version": FORMAT_VERSION,
        "family": _family_of(instance),
        "mode": mode,
        "dimensions": _dimensions_of(instance),
        "seed": int(seed),
        "stream_id": int(stream_id),
        "controls": controls or {},
        "instance_file": Path(instance_file).name,
        "instance_sha256": sha256_file(instance_file),
        "certificate": body,
        "partition": partition,
        "flags": flags,
        "verification": _enc_report(report),
    }
    _VALIDATOR.validate(doc)
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> tuple[InstanceRef, object, VerifyReport | None]:
    """Parse, schema-validate and integrity-check a manifest.

    Returns (instance reference, certificate, stored verification report).
    Numeric certificate fields round-trip bit-exactly.  A missing instance
    file or a hash mismatch raises :class:`IntegrityError`.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path}: line {e.lineno}: {e.msg}") from e
    err = next(_VALIDATOR.iter_errors(doc), None)
    if err is not None:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ManifestError(f"{path}: field {where}: {err.message}")
    instance_path = path.parent / doc["instance_file"]
    if not instance_path.exists():
        raise IntegrityError(f"instance file {instance_path} is missing")
    actual = sha256_file(instance_path)
    if actual != doc["instance_sha256"]:
        raise IntegrityError(
            f"hash mismatch for {instance_path}: manifest {doc['instance_sha256']}, file {actual}"
        )
    ref = InstanceRef(
        family=doc["family"],
        instance_path=instance_path,
        sha256=actual,
        dimensions=doc["dimensions"],
        seed=doc["seed"],
        stream_id=doc.get("stream_id", 0),
        controls=doc["controls"],
        mode=doc.get("mode"),
    )
    cert = cert_from_dict(doc["family"], doc["certificate"], doc["flags"], doc.get("partition"))
    report = _dec_report(doc.get("verification"))
    return ref, cert, report


def load_instance(ref: InstanceRef):
    """Parse the instance file a manifest points at."""
    if ref.family == "lo":
        return read_lo_mps(ref.instance_path)
    if ref.family == "sdo":
        return read_sdo_sdpa(ref.instance_path)
    if ref.family == "soco":
        return read_soco_cbf(ref.instance_path)
    raise ValueError(f"unknown family {ref.family!r}")


WRITERS = {
    "mps": ("lo", write_lo_mps, ".mps"),
    "sdpa": ("sdo", write_sdo_sdpa, ".dat-s"),
    "cbf": ("soco", write_soco_cbf, ".cbf"),
}


def canonical_writer(family: str):
    for fmt, (fam, writer, suffix) in WRITERS.items():
        if fam == family:
            return fmt, writer, suffix
    raise ValueError(f"unknown family {family!r}")
