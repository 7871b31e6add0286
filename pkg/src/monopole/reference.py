"""Published (a1, b2) values for the 5 x 5 (epsilon, lambda) grid.

The digits live in ``data/table1.csv`` verbatim; the file is
checksummed so a stray edit is caught on load.
"""
from __future__ import annotations

import csv
import hashlib
import io
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

TABLE1_SHA256 = "6aa06a9de66a06608c536018491cbbae72a8e2731bf93128c48375db567e76af"

TABLE1_EPSILONS = (0.1, 0.3, 1.0, 3.0, 10.0)
TABLE1_LAMBDAS = (0.0, 1.0, 3.0, 10.0, 30.0)


class ReferenceRow(NamedTuple):
    epsilon: float
    lam: float
    a1: float
    b2: float
    a1_text: str
    b2_text: str


class ChecksumError(RuntimeError):
    pass


def read_reference_csv(text: str) -> list[ReferenceRow]:
    """Parse a reference table with header ``epsilon,lambda,a1,b2``."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(ReferenceRow(float(rec["epsilon"]), float(rec["lambda"]),
                                 float(rec["a1"]), float(rec["b2"]), rec["a1"], rec["b2"]))
    return rows


@lru_cache(maxsize=1)
def table1() -> tuple[ReferenceRow, ...]:
    raw = resources.files("monopole").joinpath("data/table1.csv").read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != TABLE1_SHA256:
        raise ChecksumError(f"table1.csv checksum mismatch: {digest}")
    return tuple(read_reference_csv(raw.decode("utf-8")))


def table1_lookup() -> dict[tuple[float, float], ReferenceRow]:
    return {(row.epsilon, row.lam): row for row in table1()}
