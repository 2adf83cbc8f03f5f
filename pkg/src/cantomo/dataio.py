"""Text artifact formats: records, grids, reports, manifest.

All floating-point output is written with 17 significant digits so a
write/read round trip is bit-exact for float64.  Files are written
atomically (temp file in the same directory, then rename).  Every run
directory gets a manifest listing each artifact with its SHA-256;
timestamps live only in the manifest.
"""

import hashlib
import json
import os
from datetime import datetime, timezone

import numpy as np

from .dynamics import AtomMixture
from .tomography import ProbePoint, ProbeRecord, WignerGrid

__all__ = [
    "fmt",
    "fmt_complex",
    "atomic_write_text",
    "write_records",
    "read_records",
    "write_grid",
    "read_grid",
    "wigner_grid_payload",
    "write_report",
    "sha256_file",
    "write_manifest",
]

RECORDS_MAGIC = "# records v1"
GRID_MAGIC = "# grid v1"
RECORD_COLUMNS = ("tau_s", "phi_rad", "intensity", "rho_e", "p_e", "shots", "p_e_sampled")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{format(z.real, '.17g')}{format(z.imag, '+.17g')}j"


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# probe records


def write_records(path, records: list[ProbeRecord]) -> None:
    lines = [RECORDS_MAGIC, ",".join(RECORD_COLUMNS)]
    for rec in records:
        p = rec.point
        shots = "" if rec.shots is None else str(int(rec.shots))
        sampled = "" if rec.p_e_sampled is None else fmt(rec.p_e_sampled)
        lines.append(
            ",".join([fmt(p.tau), fmt(p.phi), fmt(p.intensity),
                      fmt(rec.atom.rho_e), fmt(rec.p_e), shots, sampled])
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_records(path, g: float) -> list[ProbeRecord]:
    """Read a record file; mu and theta are rebuilt from (tau, phi, g)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != RECORDS_MAGIC:
        raise ValueError(f"{path} is not a v1 record file")
    if lines[1] != ",".join(RECORD_COLUMNS):
        raise ValueError(f"{path} has an unexpected column set: {lines[1]!r}")
    out = []
    for ln in lines[2:]:
        if not ln.strip():
            continue
        parts = ln.split(",")
        if len(parts) != len(RECORD_COLUMNS):
            raise ValueError(f"malformed record line: {ln!r}")
        tau, phi, intensity, rho_e, p_e = (float(v) for v in parts[:5])
        shots = int(parts[5]) if parts[5] else None
        sampled = float(parts[6]) if parts[6] else None
        out.append(
            ProbeRecord(
                point=ProbePoint.from_settings(g, tau, phi, intensity),
                atom=AtomMixture(rho_e, 1.0 - rho_e),
                p_e=p_e,
                shots=shots,
                p_e_sampled=sampled,
            )
        )
    return out


# ---------------------------------------------------------------------------
# grids (real or complex matrices with two uniform axes)


def _axis_line(role: str, name: str, axis: np.ndarray) -> str:
    return f"# {role} {name} {len(axis)} {fmt(axis[0])} {fmt(axis[-1])}"


def write_grid(path, kind: str, rows_axis: tuple[str, np.ndarray],
               cols_axis: tuple[str, np.ndarray], values: np.ndarray,
               meta: dict | None = None) -> None:
    """Write a matrix artifact; values rows follow the rows axis."""
    values = np.asarray(values)
    if values.shape != (len(rows_axis[1]), len(cols_axis[1])):
        raise ValueError("values shape does not match the axes")
    complex_vals = np.iscomplexobj(values)
    lines = [GRID_MAGIC, f"# kind {kind}", f"# dtype {'complex' if complex_vals else 'real'}"]
    lines.append(_axis_line("rows", rows_axis[0], rows_axis[1]))
    lines.append(_axis_line("cols", cols_axis[0], cols_axis[1]))
    for key, val in (meta or {}).items():
        sval = fmt(val) if isinstance(val, float) else str(val)
        lines.append(f"# meta {key} {sval}")
    conv = fmt_complex if complex_vals else fmt
    for row in values:
        lines.append(" ".join(conv(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_grid(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != GRID_MAGIC:
        raise ValueError(f"{path} is not a v1 grid file")
    kind = dtype = None
    axes = {}
    meta = {}
    body_start = None
    for i, ln in enumerate(lines[1:], start=1):
        if not ln.startswith("#"):
            body_start = i
            break
        fields = ln[1:].split()
        tag = fields[0]
        if tag == "kind":
            kind = fields[1]
        elif tag == "dtype":
            dtype = fields[1]
        elif tag in ("rows", "cols"):
            name, n, lo, hi = fields[1], int(fields[2]), float(fields[3]), float(fields[4])
            axes[tag] = (name, np.linspace(lo, hi, n))
        elif tag == "meta":
            meta[fields[1]] = " ".join(fields[2:])
    if kind is None or dtype is None or "rows" not in axes or "cols" not in axes:
        raise ValueError(f"{path} is missing grid header lines")
    if body_start is None:
        raise ValueError(f"{path} has no grid body")
    conv = complex if dtype == "complex" else float
    rows = []
    for ln in lines[body_start:]:
        if ln.strip():
            rows.append([conv(tok) for tok in ln.split()])
    values = np.array(rows)
    if values.shape != (len(axes["rows"][1]), len(axes["cols"][1])):
        raise ValueError(f"{path} body shape {values.shape} does not match axes")
    return {"kind": kind, "rows": axes["rows"], "cols": axes["cols"],
            "values": values, "meta": meta}


def wigner_grid_payload(w: WignerGrid) -> dict:
    """Arguments for write_grid() from a WignerGrid."""
    return {
        "kind": "wigner",
        "rows_axis": ("p", w.p),
        "cols_axis": ("x", w.x),
        "values": w.values,
        "meta": {"imag_residue": float(w.imag_residue)},
    }


def write_report(path, pairs: list[tuple[str, object]]) -> None:
    """key = value report, floats at 17 significant digits."""
    lines = []
    for key, val in pairs:
        if isinstance(val, float):
            lines.append(f"{key} = {fmt(val)}")
        else:
            lines.append(f"{key} = {val}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# manifest


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, artifact_names: list[str], command: str,
                   seed: int | None) -> str:
    entries = []
    for name in sorted(artifact_names):
        full = os.path.join(out_dir, name)
        entries.append({
            "name": name,
            "bytes": os.path.getsize(full),
            "sha256": sha256_file(full),
        })
    doc = {
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "seed": seed,
        "artifacts": entries,
    }
    path = os.path.join(out_dir, "manifest.json")
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
