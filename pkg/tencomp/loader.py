"""
Reading and writing observation directories, factor matrices and run artifacts.

Every CSV goes through pandas. Floats are written with 17 significant digits
and read back with the round-trip parser, so write-then-read is lossless.
"""
from __future__ import annotations

import json
import logging
import os
import re
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ._types import AsymManifestDict, FactorMatrix, ManifestDict
from .operations._validation import ObservationParseError, validate_factor_matrix
from .operations.asym import AsymFactors
from .operations.observations import AsymObservationSet, ObservationSet

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
MANIFEST_FILE = "manifest.json"
ENTRIES_FILE = "entries.csv"
ENTRY_COLUMNS = ["i", "j", "k", "value"]

_SYM_MANIFEST_KEYS = ("d", "r_hint", "p", "sigma", "seed", "num_canonical")
_ASYM_MANIFEST_KEYS = ("d1", "d2", "d3", "p", "sigma", "seed", "num_entries")
_PARSER_LINE = re.compile(r"line (\d+)")

PathLike = str | os.PathLike[str]


def _write_json(payload: dict[str, Any], path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _read_manifest(directory: Path, keys: tuple[str, ...]) -> dict[str, Any]:
    path = directory / MANIFEST_FILE
    if not path.exists():
        raise FileNotFoundError(f"Manifest not found: {path}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ObservationParseError(
            f"read_observations failed: {path} is not valid JSON ({e.msg}).",
            path=str(path),
            line=e.lineno,
        ) from None
    if not isinstance(manifest, dict):
        raise ObservationParseError(
            f"read_observations failed: {path} must hold a JSON object.", path=str(path)
        )
    missing = [key for key in keys if key not in manifest]
    if missing:
        raise ObservationParseError(
            f"read_observations failed: {path} is missing fields {missing}.", path=str(path)
        )
    return manifest


def _read_entries(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse entries.csv into (n, 3) indices and values, reporting the 1-based file line on error."""
    if not path.exists():
        raise FileNotFoundError(f"Entries file not found: {path}")
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise ObservationParseError(
            f"read_observations failed: {path} is empty.", path=str(path), line=1
        ) from None
    except pd.errors.ParserError as e:
        raise ObservationParseError(
            f"read_observations failed: {path}: {e}", path=str(path), line=_parser_line(e)
        ) from None

    if list(df.columns) != ENTRY_COLUMNS:
        raise ObservationParseError(
            f"read_observations failed: {path} header must be {','.join(ENTRY_COLUMNS)}, "
            f"got {','.join(map(str, df.columns))}.",
            path=str(path),
            line=1,
        )

    numeric = df.apply(pd.to_numeric, errors="coerce")
    values = numeric["value"].to_numpy(dtype=np.float64)
    index_block = numeric[["i", "j", "k"]].to_numpy(dtype=np.float64)
    bad = (
        ~np.all(np.isfinite(index_block), axis=1)
        | ~np.all(np.mod(index_block, 1) == 0, axis=1)
        | ~np.isfinite(values)
    )
    if np.any(bad):
        row = int(np.argmax(bad))
        raise ObservationParseError(
            f"read_observations failed: {path} line {row + 2}: expected three integer "
            f"indices and a finite value, got {','.join(map(str, df.iloc[row].tolist()))!r}.",
            path=str(path),
            line=row + 2,
        )
    return index_block.astype(np.int64), values


def _parser_line(error: Exception) -> int | None:
    match = _PARSER_LINE.search(str(error))
    return int(match.group(1)) if match else None


def _first_bad_line(mask: np.ndarray) -> int:
    return int(np.argmax(mask)) + 2


def write_observations(obs: ObservationSet, directory: PathLike) -> Path:
    """
    Write an observation directory: manifest.json plus entries.csv.

    Example:
        write_observations(obs, "runs/instance-7")
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    manifest: ManifestDict = {
        "d": obs.d,
        "r_hint": obs.r_hint,
        "p": float(obs.p),
        "sigma": float(obs.sigma),
        "seed": obs.seed,
        "num_canonical": obs.num_canonical,
    }
    _write_json(dict(manifest), out / MANIFEST_FILE)
    entries = pd.DataFrame(obs.indices, columns=["i", "j", "k"])
    entries["value"] = obs.values
    entries.to_csv(out / ENTRIES_FILE, index=False, float_format=FLOAT_FORMAT)
    logger.info("wrote %d canonical entries to %s", obs.num_canonical, out)
    return out


def read_observations(directory: PathLike) -> ObservationSet:
    """
    Read an observation directory written by write_observations.

    Raises:
        FileNotFoundError: if the directory, manifest or entries file is missing.
        ObservationParseError: on malformed content; ``line`` names the offending
            entries.csv line (1-based, header is line 1).
    """
    src = Path(directory)
    if not src.is_dir():
        raise FileNotFoundError(f"Observation directory not found: {src}")
    manifest = _read_manifest(src, _SYM_MANIFEST_KEYS)
    entries_path = src / ENTRIES_FILE
    idx, values = _read_entries(entries_path)
    d = int(manifest["d"])

    out_of_range = np.any((idx < 0) | (idx >= d), axis=1)
    if np.any(out_of_range):
        line = _first_bad_line(out_of_range)
        raise ObservationParseError(
            f"read_observations failed: {entries_path} line {line}: index outside [0, {d}).",
            path=str(entries_path),
            line=line,
        )
    non_canonical = (idx[:, 0] > idx[:, 1]) | (idx[:, 1] > idx[:, 2])
    if np.any(non_canonical):
        line = _first_bad_line(non_canonical)
        raise ObservationParseError(
            f"read_observations failed: {entries_path} line {line}: triple is not canonical (i <= j <= k).",
            path=str(entries_path),
            line=line,
        )
    if idx.shape[0] != int(manifest["num_canonical"]):
        raise ObservationParseError(
            f"read_observations failed: manifest declares {manifest['num_canonical']} entries "
            f"but {entries_path} holds {idx.shape[0]}.",
            path=str(entries_path),
        )
    try:
        return ObservationSet(
            d=d,
            p=float(manifest["p"]),
            sigma=float(manifest["sigma"]),
            seed=int(manifest["seed"]),
            indices=idx,
            values=values,
            r_hint=None if manifest["r_hint"] is None else int(manifest["r_hint"]),
        )
    except ValueError as e:
        raise ObservationParseError(str(e), path=str(src)) from None


def write_factors(F: FactorMatrix, path: PathLike) -> Path:
    """Write a d x r factor matrix as headerless CSV."""
    F = validate_factor_matrix(F, "write_factors", "F")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(F).to_csv(out, header=False, index=False, float_format=FLOAT_FORMAT)
    return out


def read_factors(path: PathLike) -> FactorMatrix:
    """
    Read a headerless factor-matrix CSV.

    Raises:
        FileNotFoundError: if the file does not exist.
        ObservationParseError: on ragged rows or non-numeric cells.
    """
    src = Path(path)
    if not src.exists():
        raise FileNotFoundError(f"Factor file not found: {src}")
    try:
        df = pd.read_csv(src, header=None, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise ObservationParseError(f"read_factors failed: {src} is empty.", path=str(src), line=1) from None
    except pd.errors.ParserError as e:
        raise ObservationParseError(
            f"read_factors failed: {src}: {e}", path=str(src), line=_parser_line(e)
        ) from None

    numeric = df.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.all(np.isfinite(numeric), axis=1)
    if np.any(bad):
        line = int(np.argmax(bad)) + 1
        raise ObservationParseError(
            f"read_factors failed: {src} line {line}: expected {numeric.shape[1]} finite values.",
            path=str(src),
            line=line,
        )
    return numeric


def write_asym_observations(obs: AsymObservationSet, directory: PathLike) -> Path:
    """Write an asymmetric observation directory (unordered triples, no symmetrization)."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    d1, d2, d3 = obs.dims
    manifest: AsymManifestDict = {
        "d1": d1,
        "d2": d2,
        "d3": d3,
        "p": float(obs.p),
        "sigma": float(obs.sigma),
        "seed": obs.seed,
        "num_entries": obs.num_entries,
    }
    _write_json(dict(manifest), out / MANIFEST_FILE)
    entries = pd.DataFrame(obs.indices, columns=["i", "j", "k"])
    entries["value"] = obs.values
    entries.to_csv(out / ENTRIES_FILE, index=False, float_format=FLOAT_FORMAT)
    return out


def read_asym_observations(directory: PathLike) -> AsymObservationSet:
    src = Path(directory)
    if not src.is_dir():
        raise FileNotFoundError(f"Observation directory not found: {src}")
    manifest = _read_manifest(src, _ASYM_MANIFEST_KEYS)
    entries_path = src / ENTRIES_FILE
    idx, values = _read_entries(entries_path)
    dims = (int(manifest["d1"]), int(manifest["d2"]), int(manifest["d3"]))

    out_of_range = np.any((idx < 0) | (idx >= np.array(dims)), axis=1)
    if np.any(out_of_range):
        line = _first_bad_line(out_of_range)
        raise ObservationParseError(
            f"read_observations failed: {entries_path} line {line}: index outside dims {dims}.",
            path=str(entries_path),
            line=line,
        )
    if idx.shape[0] != int(manifest["num_entries"]):
        raise ObservationParseError(
            f"read_observations failed: manifest declares {manifest['num_entries']} entries "
            f"but {entries_path} holds {idx.shape[0]}.",
            path=str(entries_path),
        )
    try:
        return AsymObservationSet(
            dims=dims,
            p=float(manifest["p"]),
            sigma=float(manifest["sigma"]),
            seed=int(manifest["seed"]),
            indices=idx,
            values=values,
        )
    except ValueError as e:
        raise ObservationParseError(str(e), path=str(src)) from None


def write_asym_factors(F: AsymFactors, directory: PathLike) -> Path:
    """Write U.csv, V.csv and W.csv into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_factors(F.U, out / "U.csv")
    write_factors(F.V, out / "V.csv")
    write_factors(F.W, out / "W.csv")
    return out


def read_asym_factors(directory: PathLike) -> AsymFactors:
    src = Path(directory)
    return AsymFactors(
        U=read_factors(src / "U.csv"),
        V=read_factors(src / "V.csv"),
        W=read_factors(src / "W.csv"),
    )


def write_frame(df: pd.DataFrame, path: PathLike) -> Path:
    """Write a result table (trace, rows, aggregate) with full-precision floats."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False, float_format=FLOAT_FORMAT)
    return out


def write_metrics(metrics: dict[str, Any], path: PathLike) -> Path:
    """Write a metrics record as JSON; floats keep their full repr."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_json(metrics, out)
    return out


def read_metrics(path: PathLike) -> dict[str, Any]:
    return dict(json.loads(Path(path).read_text()))


__all__ = [
    "write_observations",
    "read_observations",
    "write_factors",
    "read_factors",
    "write_asym_observations",
    "read_asym_observations",
    "write_asym_factors",
    "read_asym_factors",
    "write_frame",
    "write_metrics",
    "read_metrics",
]
