"""Exact frame data: synthesis matrices, Gram matrices and triple-product tables."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from .cyclotomic import Cyclotomic
from .errors import OrderMismatchError

__all__ = [
    "FrameMatrix",
    "GramMatrix",
    "TripleTable",
    "load_json",
    "dump_json",
    "normalize_label",
]


def normalize_label(x: Any):
    """Make a JSON label hashable (lists become tuples)."""
    if isinstance(x, list):
        return tuple(normalize_label(v) for v in x)
    return x


def _label_json(x: Any):
    if isinstance(x, tuple):
        return [_label_json(v) for v in x]
    return x


def _check_order(rows: Sequence[Sequence[Cyclotomic]], m: int) -> None:
    for row in rows:
        for z in row:
            if z.m != m:
                raise OrderMismatchError(f"entry of order {z.m} in a matrix of order {m}")


@dataclass(frozen=True)
class FrameMatrix:
    """A d x n synthesis matrix whose columns are the frame vectors."""

    m: int
    entries: tuple[tuple[Cyclotomic, ...], ...]
    labels: tuple

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise ValueError("frame matrix must be non-empty")
        n = len(self.entries[0])
        if any(len(r) != n for r in self.entries):
            raise ValueError("ragged frame matrix")
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for {n} columns")
        if n < len(self.entries):
            raise ValueError("frame must have n >= d")
        _check_order(self.entries, self.m)

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    def column(self, j: int) -> tuple[Cyclotomic, ...]:
        return tuple(row[j] for row in self.entries)

    def conj(self) -> FrameMatrix:
        return FrameMatrix(self.m, tuple(tuple(z.conj() for z in r) for r in self.entries), self.labels)

    def rescale_columns(self, scalars: Sequence[Cyclotomic]) -> FrameMatrix:
        rows = tuple(tuple(z * c for z, c in zip(r, scalars)) for r in self.entries)
        return FrameMatrix(self.m, rows, self.labels)

    def permute_columns(self, perm: Sequence[int]) -> FrameMatrix:
        """Column j of the result is column perm[j] of self."""
        rows = tuple(tuple(r[perm[j]] for j in range(self.n)) for r in self.entries)
        return FrameMatrix(self.m, rows, tuple(self.labels[perm[j]] for j in range(self.n)))

    def to_json(self) -> dict:
        return {
            "kind": "frame",
            "m": self.m,
            "d": self.d,
            "n": self.n,
            "labels": [_label_json(x) for x in self.labels],
            "entries": [[z.to_json() for z in r] for r in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> FrameMatrix:
        rows = tuple(tuple(Cyclotomic.from_json(z) for z in r) for r in data["entries"])
        fm = cls(int(data["m"]), rows, tuple(normalize_label(x) for x in data["labels"]))
        if fm.d != int(data.get("d", fm.d)) or fm.n != int(data.get("n", fm.n)):
            raise ValueError("declared shape does not match entries")
        return fm


@dataclass(frozen=True)
class GramMatrix:
    """G[j][k] = <phi_j, phi_k>, linear in the first argument."""

    m: int
    entries: tuple[tuple[Cyclotomic, ...], ...]
    labels: tuple

    def __post_init__(self):
        n = len(self.entries)
        if n == 0 or any(len(r) != n for r in self.entries):
            raise ValueError("Gram matrix must be square and non-empty")
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for {n} vectors")
        _check_order(self.entries, self.m)
        for j in range(n):
            for k in range(j, n):
                if self.entries[j][k] != self.entries[k][j].conj():
                    raise ValueError(f"Gram matrix is not Hermitian at ({j}, {k})")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, jk: tuple[int, int]) -> Cyclotomic:
        return self.entries[jk[0]][jk[1]]

    def diagonal(self) -> tuple[Cyclotomic, ...]:
        return tuple(self.entries[i][i] for i in range(self.n))

    def principal(self, subset: Sequence[int]) -> list[list[Cyclotomic]]:
        return [[self.entries[j][k] for k in subset] for j in subset]

    def map(self, fn: Callable[[Cyclotomic], Cyclotomic], m: int | None = None) -> GramMatrix:
        rows = tuple(tuple(fn(z) for z in r) for r in self.entries)
        return GramMatrix(self.m if m is None else m, rows, self.labels)

    def conj(self) -> GramMatrix:
        return self.map(Cyclotomic.conj)

    def to_json(self) -> dict:
        return {
            "kind": "gram",
            "m": self.m,
            "n": self.n,
            "labels": [_label_json(x) for x in self.labels],
            "entries": [[z.to_json() for z in r] for r in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> GramMatrix:
        rows = tuple(tuple(Cyclotomic.from_json(z) for z in r) for r in data["entries"])
        return cls(int(data["m"]), rows, tuple(normalize_label(x) for x in data["labels"]))


@dataclass(frozen=True)
class TripleTable:
    """Triple products on ordered triples of distinct indices.

    Only used for constructions given directly by their triple products; for
    frames with a Gram matrix the label tables are built from the Gram itself.
    """

    m: int
    labels: tuple
    values: dict  # (j, k, l) -> Cyclotomic

    @property
    def n(self) -> int:
        return len(self.labels)

    def __getitem__(self, jkl: tuple[int, int, int]) -> Cyclotomic:
        return self.values[jkl]

    def check_invariants(self) -> None:
        """Cyclic invariance and conjugation under a swap, on every triple."""
        n = self.n
        for j, k, l in itertools.permutations(range(n), 3):
            v = self.values[(j, k, l)]
            if v != self.values[(k, l, j)]:
                raise ValueError(f"triple table not cyclically invariant at {(j, k, l)}")
            if v.conj() != self.values[(j, l, k)]:
                raise ValueError(f"triple table swap is not conjugation at {(j, k, l)}")

    def to_json(self) -> dict:
        entries = [[j, k, l, self.values[(j, k, l)].to_json()] for j, k, l in sorted(self.values)]
        return {
            "kind": "triple_table",
            "m": self.m,
            "n": self.n,
            "labels": [_label_json(x) for x in self.labels],
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: dict) -> TripleTable:
        values = {(int(j), int(k), int(l)): Cyclotomic.from_json(z) for j, k, l, z in data["entries"]}
        labels = tuple(normalize_label(x) for x in data["labels"])
        n = len(labels)
        if len(values) != n * (n - 1) * (n - 2):
            raise ValueError("triple table must list every ordered distinct triple")
        return cls(int(data["m"]), labels, values)


def load_json(path: str | Path | None = None, data: dict | None = None):
    """Load a FrameMatrix, GramMatrix or TripleTable from a JSON file or dict."""
    if data is None:
        data = json.loads(Path(path).read_text())
    kind = data.get("kind")
    if kind is None:
        kind = "frame" if "d" in data else "gram"
    if kind == "frame":
        return FrameMatrix.from_json(data)
    if kind == "gram":
        return GramMatrix.from_json(data)
    if kind == "triple_table":
        return TripleTable.from_json(data)
    raise ValueError(f"unknown object kind {kind!r}")


def dump_json(obj, path: str | Path | None = None) -> str:
    text = json.dumps(obj.to_json(), sort_keys=True, separators=(",", ":"))
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
