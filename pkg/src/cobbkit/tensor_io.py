"""Reader/writer for the "tensor-text v1" file format.

First line: ``TT1 <h> <w> <k>`` for prototype stacks or ``TT1 <n> <k>``
for coefficient matrices. The remaining content is whitespace-separated
decimal reals in row-major order. UTF-8, LF line endings.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .masks import CoeffMatrix, PrototypeStack

MAGIC = "TT1"


def _parse(text: str, expected_dims: int, what: str) -> np.ndarray:
    head, _, body = text.partition("\n")
    tokens = head.split()
    if not tokens or tokens[0] != MAGIC:
        raise ValueError(f"{what}: missing {MAGIC} header")
    try:
        dims = [int(t) for t in tokens[1:]]
    except ValueError as e:
        raise ValueError(f"{what}: non-integer dimension in header {head!r}") from e
    if len(dims) != expected_dims:
        raise ValueError(
            f"{what}: expected {expected_dims} dimensions in header, got {len(dims)}"
        )
    values = [float(t) for t in body.split()]
    want = math.prod(dims)
    if len(values) != want:
        raise ValueError(f"{what}: expected {want} values for {dims}, got {len(values)}")
    return np.asarray(values, dtype=float).reshape(dims)


def read_prototypes(path: str | Path) -> PrototypeStack:
    text = Path(path).read_text(encoding="utf-8")
    return PrototypeStack(_parse(text, 3, f"prototype file {path}"))


def read_coefficients(path: str | Path) -> CoeffMatrix:
    text = Path(path).read_text(encoding="utf-8")
    return CoeffMatrix(_parse(text, 2, f"coefficient file {path}"))


def _format(values: np.ndarray) -> str:
    header = f"{MAGIC} " + " ".join(str(d) for d in values.shape)
    body = "\n".join(
        " ".join(repr(float(x)) for x in row) for row in values.reshape(values.shape[0], -1)
    )
    return header + "\n" + body + "\n"


def write_prototypes(p: PrototypeStack, path: str | Path) -> None:
    Path(path).write_text(_format(p.values), encoding="utf-8", newline="\n")


def write_coefficients(c: CoeffMatrix, path: str | Path) -> None:
    Path(path).write_text(_format(c.values), encoding="utf-8", newline="\n")
