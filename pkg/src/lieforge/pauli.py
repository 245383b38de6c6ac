"""Exact Pauli-string algebra.

A :class:`PauliString` packs an n-qubit string into two integer masks.
A :class:`PauliSum` stores the anti-Hermitian operator ``i * sum_P c_P P``
with real coefficients, so every PauliSum is a valid Lie-algebra element
by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from ._config import PRUNE_TOL, dense_qubit_limit
from .errors import DenseLimitError, DimensionMismatchError

_LETTERS = "IXYZ"
# (x, z) -> letter
_DECODE = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_ENCODE = {v: k for k, v in _DECODE.items()}
_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)


def _popcount(v: int) -> int:
    return int(v).bit_count()


@dataclass(frozen=True, slots=True)
class PauliString:
    """Tensor product of single-qubit Paulis, leftmost letter = qubit 1.

    Bit ``n - 1 - k`` of ``x_mask``/``z_mask`` encodes letter ``k``.
    """

    n: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        top = ~((1 << self.n) - 1)
        if self.x_mask < 0 or self.z_mask < 0 or (self.x_mask & top) or (self.z_mask & top):
            raise ValueError(f"mask bits set outside an {self.n}-qubit register")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        label = label.strip().upper()
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for ch in label:
            try:
                bx, bz = _ENCODE[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r} in {label!r}") from None
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, site: int, letter: str) -> "PauliString":
        """``letter`` on qubit ``site`` (1-based), identity elsewhere."""
        if not 1 <= site <= n:
            raise ValueError(f"site {site} outside 1..{n}")
        labels = ["I"] * n
        labels[site - 1] = letter
        return cls.from_label("".join(labels))

    @property
    def label(self) -> str:
        out = []
        for k in range(self.n):
            bit = self.n - 1 - k
            out.append(_DECODE[((self.x_mask >> bit) & 1, (self.z_mask >> bit) & 1)])
        return "".join(out)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    def __lt__(self, other: "PauliString") -> bool:
        return (self.n, self.label) < (other.n, other.label)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def _check_same(n1: int, n2: int) -> None:
    if n1 != n2:
        raise DimensionMismatchError(f"register sizes differ: {n1} vs {n2}")


def _product_exponent(p: PauliString, q: PauliString) -> tuple[int, int, int]:
    rx = p.x_mask ^ q.x_mask
    rz = p.z_mask ^ q.z_mask
    e = (_popcount(p.x_mask & p.z_mask) + _popcount(q.x_mask & q.z_mask)
         + 2 * _popcount(p.z_mask & q.x_mask) - _popcount(rx & rz)) % 4
    return e, rx, rz


def pauli_multiply(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """Exact product ``p @ q = phase * r`` with phase in {1, i, -1, -i}."""
    _check_same(p.n, q.n)
    e, rx, rz = _product_exponent(p, q)
    return _PHASES[e], PauliString(p.n, rx, rz)


def symplectic_commutes(p: PauliString, q: PauliString) -> bool:
    _check_same(p.n, q.n)
    return _popcount((p.x_mask & q.z_mask) ^ (p.z_mask & q.x_mask)) % 2 == 0


class PauliSum:
    """Anti-Hermitian operator ``i * sum_P c_P P`` with real ``c_P``.

    Parameters
    ----------
    n : int
        Qubit count.
    terms : mapping, optional
        ``PauliString`` (or label) to real coefficient. Entries with
        ``|c| <= PRUNE_TOL`` are dropped.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = int(n)
        clean: dict[PauliString, float] = {}
        if terms:
            for key, value in terms.items():
                p = PauliString.from_label(key) if isinstance(key, str) else key
                _check_same(self.n, p.n)
                if isinstance(value, complex) or np.iscomplexobj(value):
                    if abs(complex(value).imag) > PRUNE_TOL:
                        raise ValueError(f"non-real coefficient {value!r} on {p.label}")
                    value = complex(value).real
                c = clean.get(p, 0.0) + float(value)
                clean[p] = c
        self._terms = {p: c for p, c in clean.items() if abs(c) > PRUNE_TOL}

    @classmethod
    def from_string(cls, p: PauliString, coeff: float = 1.0) -> "PauliSum":
        return cls(p.n, {p: coeff})

    @classmethod
    def from_labels(cls, items: Iterable[tuple[float, str]]) -> "PauliSum":
        items = list(items)
        if not items:
            raise ValueError("need at least one term to infer the register size")
        n = len(items[0][1])
        acc: dict[PauliString, float] = {}
        for c, lab in items:
            p = PauliString.from_label(lab)
            acc[p] = acc.get(p, 0.0) + float(c)
        return cls(n, acc)

    @property
    def terms(self) -> dict[PauliString, float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coeff(self, p: PauliString | str) -> float:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        return self._terms.get(p, 0.0)

    def sorted_items(self) -> list[tuple[PauliString, float]]:
        return sorted(self._terms.items(), key=lambda kv: kv[0].label)

    def norm(self) -> float:
        """Coefficient 2-norm; the HS norm is this times ``sqrt(2**n)``."""
        return sqrt(sum(c * c for c in self._terms.values()))

    def dot(self, other: "PauliSum") -> float:
        _check_same(self.n, other.n)
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        return sum(c * big._terms.get(p, 0.0) for p, c in small._terms.items())

    def is_single_string(self) -> bool:
        return len(self._terms) == 1

    def __add__(self, other: "PauliSum") -> "PauliSum":
        _check_same(self.n, other.n)
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0.0) + c
        return PauliSum(self.n, acc)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "PauliSum":
        scalar = float(scalar)
        return PauliSum(self.n, {p: scalar * c for p, c in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def to_text(self) -> str:
        """Terms as ``<coeff> <string> + ...`` in canonical order."""
        return " + ".join(f"{c!r} {p.label}" for p, c in self.sorted_items())

    def __repr__(self) -> str:
        body = self.to_text() or "0"
        return f"PauliSum(n={self.n}, i*({body}))"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``[a, b]`` in canonical form.

    For single strings ``[iP, iQ] = -2 i^(e-1) * (iR)`` where ``PQ = i^e R``;
    only anticommuting pairs (odd e) contribute, so coefficients stay real.
    """
    _check_same(a.n, b.n)
    acc: dict[PauliString, float] = {}
    for p, cp in a.items():
        for q, cq in b.items():
            if symplectic_commutes(p, q):
                continue
            e, rx, rz = _product_exponent(p, q)
            r = PauliString(a.n, rx, rz)
            val = -2.0 * cp * cq if e == 1 else 2.0 * cp * cq
            acc[r] = acc.get(r, 0.0) + val
    return PauliSum(a.n, acc)


def _check_dense_size(n: int) -> None:
    limit = dense_qubit_limit()
    if n > limit:
        raise DenseLimitError("dense register (qubits)", n, limit)


def hermitian_matrix(a: PauliSum) -> np.ndarray:
    """Dense ``sum_P c_P P``, the Hermitian operator H with ``a = iH``."""
    _check_dense_size(a.n)
    items = a.sorted_items()
    xs = [p.x_mask for p, _ in items]
    zs = [p.z_mask for p, _ in items]
    cs = [c for _, c in items]
    if not items:
        d = 1 << a.n
        return np.zeros((d, d), dtype=np.complex128)
    return _kernels.pauli_dense(xs, zs, cs, a.n)


def to_dense(a: PauliSum):
    """Dense anti-Hermitian matrix of ``a`` wrapped as a DenseOperator."""
    from .dense import DenseOperator

    return DenseOperator(1j * hermitian_matrix(a), role="anti_hermitian", check=False)


def string_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of the bare string P (no factor i)."""
    _check_dense_size(p.n)
    return _kernels.pauli_dense([p.x_mask], [p.z_mask], [1.0], p.n)


def random_pauli_string(n: int, rng: np.random.Generator, allow_identity: bool = False) -> PauliString:
    while True:
        x = int(rng.integers(0, 1 << n))
        z = int(rng.integers(0, 1 << n))
        if allow_identity or x or z:
            return PauliString(n, x, z)
