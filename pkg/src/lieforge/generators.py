"""Generator sets and their on-disk formats.

Text format (symbolic)::

    qubits 2
    # comment
    gen A1 : 2.0 ZZ + -1.0 XX + -1.0 YY

meaning ``A1 = i(2 ZZ - XX - YY)``. Letters are IXYZ, leftmost = qubit 1.

JSON format (dense)::

    {"dim": d, "re": [[...]], "im": [[...]]}                  # one matrix
    {"generators": [{"name": "g1", "dim": d, "re": ..., "im": ...}, ...]}

Dense generator matrices are taken as the anti-Hermitian generator itself
unless the entry carries ``"role": "hermitian"``, in which case it is
multiplied by i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .dense import DenseOperator, as_array, is_anti_hermitian
from .errors import DimensionMismatchError, ParseError
from .pauli import PauliString, PauliSum, to_dense


@dataclass
class GeneratorSet:
    """Ordered, named generators on a common register.

    ``ops`` holds either :class:`PauliSum` objects (symbolic) or
    :class:`DenseOperator` objects (dense, anti-Hermitian). ``meta`` carries
    construction details, e.g. the block projectors of a composed set.
    """

    names: list[str]
    ops: list
    dim: int
    n_qubits: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) != len(self.ops):
            raise ValueError("names and ops differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        for op in self.ops:
            d = (1 << op.n) if isinstance(op, PauliSum) else as_array(op).shape[0]
            if d != self.dim:
                raise DimensionMismatchError(f"generator of dimension {d} in a set of dimension {self.dim}")

    @classmethod
    def from_pauli(cls, ops: Sequence[PauliSum | PauliString | str], names=None) -> "GeneratorSet":
        sums = []
        for op in ops:
            if isinstance(op, str):
                op = PauliString.from_label(op)
            if isinstance(op, PauliString):
                op = PauliSum.from_string(op)
            sums.append(op)
        if not sums:
            raise ValueError("empty generator set")
        n = sums[0].n
        for s in sums:
            if s.n != n:
                raise DimensionMismatchError("inconsistent qubit counts")
        names = list(names) if names is not None else [f"g{k + 1}" for k in range(len(sums))]
        return cls(names, sums, 1 << n, n)

    @classmethod
    def from_dense(cls, mats, names=None, meta=None) -> "GeneratorSet":
        ops = []
        for m in mats:
            a = as_array(m)
            ops.append(DenseOperator(a, role="anti_hermitian"))
        if not ops:
            raise ValueError("empty generator set")
        d = ops[0].dim
        n = int(np.log2(d)) if d & (d - 1) == 0 else None
        names = list(names) if names is not None else [f"g{k + 1}" for k in range(len(ops))]
        return cls(names, ops, d, n, dict(meta or {}))

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    @property
    def is_symbolic(self) -> bool:
        return all(isinstance(op, PauliSum) for op in self.ops)

    @property
    def is_pauli_strings(self) -> bool:
        """True when every generator is a single string (any coefficient)."""
        return self.is_symbolic and all(op.is_single_string() for op in self.ops)

    def strings(self) -> list[PauliString]:
        if not self.is_pauli_strings:
            raise ValueError("generator set is not made of single Pauli strings")
        return [next(iter(op)) for op in self.ops]

    def dense(self) -> list[np.ndarray]:
        """Anti-Hermitian matrices of all generators."""
        return [to_dense(op).matrix if isinstance(op, PauliSum) else as_array(op) for op in self.ops]

    def union(self, other: "GeneratorSet") -> "GeneratorSet":
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimensions differ: {self.dim} vs {other.dim}")
        names = list(self.names)
        for nm in other.names:
            base, k = nm, 2
            while nm in names:
                nm = f"{base}_{k}"
                k += 1
            names.append(nm)
        if self.is_symbolic and other.is_symbolic:
            return GeneratorSet(names, list(self.ops) + list(other.ops), self.dim, self.n_qubits)
        return GeneratorSet.from_dense(self.dense() + other.dense(), names)

    def to_text(self) -> str:
        if not self.is_symbolic:
            raise ValueError("only symbolic generator sets have a text form")
        lines = [f"qubits {self.n_qubits}"]
        for name, op in zip(self.names, self.ops):
            lines.append(f"gen {name} : {op.to_text()}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        gens = []
        for name, m in zip(self.names, self.dense()):
            gens.append({"name": name, "dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()})
        return {"generators": gens}


# -- text format -----------------------------------------------------------

def _parse_terms(rhs: str, n: int, lineno: int, path) -> PauliSum:
    tokens = rhs.split()
    if not tokens:
        raise ParseError("generator has no terms", lineno, path)
    acc: dict[PauliString, float] = {}
    k = 0
    while True:
        if k + 1 >= len(tokens):
            raise ParseError("expected '<coeff> <string>'", lineno, path)
        ctok, stok = tokens[k], tokens[k + 1]
        try:
            c = float(ctok)
        except ValueError:
            try:
                complex(ctok.replace("i", "j"))
            except ValueError:
                raise ParseError(f"bad coefficient {ctok!r}", lineno, path) from None
            raise ParseError(f"non-real coefficient {ctok!r}", lineno, path) from None
        if not np.isfinite(c):
            raise ParseError(f"non-finite coefficient {ctok!r}", lineno, path)
        if len(stok) != n:
            raise ParseError(f"string {stok!r} has length {len(stok)}, register has {n} qubits", lineno, path)
        try:
            p = PauliString.from_label(stok)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
        acc[p] = acc.get(p, 0.0) + c
        k += 2
        if k == len(tokens):
            break
        if tokens[k] != "+":
            raise ParseError(f"expected '+' between terms, got {tokens[k]!r}", lineno, path)
        k += 1
    return PauliSum(n, acc)


def parse_generator_text(text: str, path=None) -> GeneratorSet:
    n = None
    names, ops = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head == "qubits":
            if n is not None:
                raise ParseError("duplicate 'qubits' header", lineno, path)
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("header must be 'qubits <n>'", lineno, path)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"bad qubit count {parts[1]!r}", lineno, path) from None
            if n < 1:
                raise ParseError("qubit count must be positive", lineno, path)
        elif head == "gen":
            if n is None:
                raise ParseError("'gen' line before 'qubits' header", lineno, path)
            body = line[3:]
            if ":" not in body:
                raise ParseError("generator line must be 'gen <name> : <terms>'", lineno, path)
            name, rhs = body.split(":", 1)
            name = name.strip()
            if not name or len(name.split()) != 1:
                raise ParseError(f"bad generator name {name!r}", lineno, path)
            if name in names:
                raise ParseError(f"duplicate generator name {name!r}", lineno, path)
            op = _parse_terms(rhs, n, lineno, path)
            if len(op) == 0:
                raise ParseError(f"generator {name!r} is zero", lineno, path)
            names.append(name)
            ops.append(op)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, path)
    if n is None and not ops:
        raise ParseError("no generators", None, path)
    if not ops:
        raise ParseError("no generators", None, path)
    return GeneratorSet(names, ops, 1 << n, n)


# -- JSON matrices -----------------------------------------------------------

def matrix_from_json(obj: dict, where="matrix") -> np.ndarray:
    try:
        d = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: expected keys dim/re/im ({exc})") from None
    if re.shape != (d, d) or im.shape != (d, d):
        raise ParseError(f"{where}: re/im must be {d}x{d}")
    return re + 1j * im


def matrix_to_json(m) -> dict:
    a = as_array(m)
    return {"dim": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def parse_dense_json(text: str, path=None) -> GeneratorSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
    entries = obj["generators"] if isinstance(obj, dict) and "generators" in obj else [obj]
    names, mats = [], []
    for k, entry in enumerate(entries):
        m = matrix_from_json(entry, where=f"generator {k + 1}")
        if entry.get("role") == "hermitian":
            m = 1j * m
        if not is_anti_hermitian(m):
            raise ParseError(f"generator {k + 1} is not anti-Hermitian", None, path)
        name = entry.get("name", f"g{k + 1}")
        if name in names:
            raise ParseError(f"duplicate generator name {name!r}", None, path)
        names.append(name)
        mats.append(m)
    if not mats:
        raise ParseError("no generators", None, path)
    return GeneratorSet.from_dense(mats, names)


def load_generators(path) -> GeneratorSet:
    """Read a generator file, choosing the format from its first character."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        return parse_dense_json(text, path)
    return parse_generator_text(text, path)


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, path) from None
    return matrix_from_json(obj, where=str(path))
