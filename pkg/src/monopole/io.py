"""Flat-file serialization: profile/table CSV, SolveResult JSON, run manifests.

Floats are written with ``repr`` (shortest round-trip form), so parsing a
written value gives back the identical double.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from monopole import __version__
from monopole.integrator import IntegratorConfig
from monopole.model import Params, Profile
from monopole.reference import ReferenceRow, read_reference_csv
from monopole.series import SeedCoeffs
from monopole.shooting import CellFailure, ShootingConfig, SolveResult

PROFILE_COLUMNS = ("r", "gamma", "phi", "dgamma", "dphi")
TABLE_COLUMNS = ("epsilon", "lambda", "a1", "b2", "residual_inf", "iterations", "status")


def fmt(x: float) -> str:
    return repr(float(x))


def atomic_write(path, text: str) -> Path:
    """Write ``text`` via a temporary file in the same directory plus rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sample_indices(n: int, sample: int | None) -> np.ndarray:
    """Up to ``sample`` evenly spread indices of ``range(n)``, always keeping both ends."""
    if sample is None or sample >= n:
        return np.arange(n)
    if sample < 2:
        raise ValueError("sample must be at least 2")
    return np.unique(np.rint(np.linspace(0, n - 1, sample)).astype(int))


def profile_csv(profile: Profile, sample: int | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for i in sample_indices(len(profile), sample):
        g, dg, p, dp = profile.states[i]
        w.writerow([fmt(profile.radii[i]), fmt(g), fmt(p), fmt(dg), fmt(dp)])
    return buf.getvalue()


def read_profile_csv(text: str, params: Params) -> Profile:
    rows = list(csv.DictReader(io.StringIO(text)))
    radii = [float(r["r"]) for r in rows]
    states = [[float(r["gamma"]), float(r["dgamma"]), float(r["phi"]), float(r["dphi"])] for r in rows]
    return Profile(params, np.array(radii), np.array(states))


def table_rows(results) -> list[dict]:
    rows = []
    for res in results:
        p = res.params
        if isinstance(res, CellFailure):
            best = res.best
            rows.append({"epsilon": p.epsilon, "lambda": p.lam,
                         "a1": best.a1 if best else float("nan"),
                         "b2": best.b2 if best else float("nan"),
                         "residual_inf": float("nan"), "iterations": -1, "status": res.code})
        else:
            rows.append({"epsilon": p.epsilon, "lambda": p.lam, "a1": res.seed.a1, "b2": res.seed.b2,
                         "residual_inf": res.residual_inf, "iterations": res.iterations,
                         "status": "converged"})
    return rows


def table_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for row in table_rows(results):
        w.writerow([fmt(row[c]) if isinstance(row[c], float) else str(row[c]) for c in TABLE_COLUMNS])
    return buf.getvalue()


def compare_table(results, reference: list[ReferenceRow]) -> dict:
    """Max |delta a1| and |delta b2| against reference rows, matched on (epsilon, lambda)."""
    ref = {(r.epsilon, r.lam): r for r in reference}
    cells, missing = [], []
    for res in results:
        key = (res.params.epsilon, res.params.lam)
        row = ref.get(key)
        if row is None or isinstance(res, CellFailure):
            missing.append(list(key))
            continue
        cells.append({"epsilon": key[0], "lambda": key[1],
                      "da1": res.seed.a1 - row.a1, "db2": res.seed.b2 - row.b2})
    return {
        "max_abs_da1": max((abs(c["da1"]) for c in cells), default=float("nan")),
        "max_abs_db2": max((abs(c["db2"]) for c in cells), default=float("nan")),
        "cells": cells,
        "unmatched": missing,
    }


def load_reference(path) -> list[ReferenceRow]:
    return read_reference_csv(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# JSON


def profile_to_dict(profile: Profile) -> dict:
    return {
        "params": {"epsilon": profile.params.epsilon, "lambda": profile.params.lam},
        "r_match": profile.r_match,
        "radii": profile.radii.tolist(),
        "states": profile.states.tolist(),
    }


def profile_from_dict(d: dict) -> Profile:
    params = Params(d["params"]["epsilon"], d["params"]["lambda"])
    states = np.array(d["states"], dtype=float).reshape(-1, 4)
    return Profile(params, np.array(d["radii"], dtype=float), states, d["r_match"])


def result_to_dict(res: SolveResult, include_profile: bool = True) -> dict:
    d = {
        "epsilon": res.params.epsilon,
        "lambda": res.params.lam,
        "a1": res.seed.a1,
        "b2": res.seed.b2,
        "residual": list(res.residual),
        "residual_inf": res.residual_inf,
        "iterations": res.iterations,
        "action": res.action_value,
        "el_residual_max": res.el_residual_max,
        "residual_history": list(res.residual_history),
    }
    if include_profile:
        d["profile"] = profile_to_dict(res.profile)
    return d


def result_from_dict(d: dict) -> SolveResult:
    return SolveResult(
        seed=SeedCoeffs(d["a1"], d["b2"]),
        params=Params(d["epsilon"], d["lambda"]),
        residual=(float(d["residual"][0]), float(d["residual"][1])),
        iterations=int(d["iterations"]),
        profile=profile_from_dict(d["profile"]),
        action_value=float(d["action"]),
        el_residual_max=float(d["el_residual_max"]),
        residual_history=tuple(float(x) for x in d.get("residual_history", ())),
    )


def result_to_json(res: SolveResult, include_profile: bool = True) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(result_to_dict(res, include_profile), allow_nan=True)


def result_from_json(text: str) -> SolveResult:
    return result_from_dict(json.loads(text))


def config_to_dict(config: ShootingConfig) -> dict:
    return asdict(config)


def config_from_dict(d: dict) -> ShootingConfig:
    d = dict(d)
    d["integrator"] = IntegratorConfig(**d["integrator"])
    return ShootingConfig(**d)


def error_payload(code: str, detail: str, context: dict | None = None) -> str:
    return json.dumps({"error": code, "detail": detail, "context": context or {}})


# ---------------------------------------------------------------------------
# Manifests


def manifest_path(data_path) -> Path:
    data_path = Path(data_path)
    return data_path.with_name(data_path.name + ".manifest.json")


def build_manifest(command: str, config: ShootingConfig, grid: list[tuple[float, float]],
                   outcomes: list[dict], files: list[str]) -> dict:
    return {
        "tool": "monopole",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "config": config_to_dict(config),
        "grid": [{"epsilon": e, "lambda": lam} for e, lam in grid],
        "outcomes": outcomes,
        "files": files,
    }


def write_with_manifest(path, text: str, manifest: dict) -> tuple[Path, Path]:
    """Atomically write a data file and the one manifest that references it."""
    path = atomic_write(path, text)
    manifest = dict(manifest, files=[path.name])
    mpath = atomic_write(manifest_path(path), json.dumps(manifest, indent=2) + "\n")
    return path, mpath
