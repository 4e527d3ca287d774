"""Truncated Fock-space matrix backend: the numeric oracle for the symbolic engine.

A :class:`FockSpace` is the tensor product of per-mode occupation spaces,
bosons truncated at occupations ``0..D-1`` (the creator annihilates the top
state), fermions two-dimensional.  Basis states are occupation tuples in
row-major order with the *last* mode fastest; the vacuum has index 0.

Bare ladder matrices of different modes commute exactly by construction.
Nontrivial cross-mode statistics (abnormal signs, q-factors) are produced in
:func:`evaluate` by multiplying each mode's annihilator with a diagonal
occupation-phase built from the spec's exchange matrix -- the reversible
dressing construction rather than a hard-coded operator string.  Cross-mode
identities are therefore exact on the full truncated space; only a boson
mode's own commutation relation acquires a truncation defect, confined to the
top occupation level, which is why :func:`check_zero` reports the residual on
the interior subspace (all boson occupations <= D-2) alongside the full-space
residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .algebra import AlgebraSpec, BOSON, FERMION, Mode, OpExpr, UnknownModeError, _coerce_expr
from .qscalar import UnitScalar

#: refuse to build spaces past desk scale
MAX_DIMENSION = 4096


class FockSpace:
    """Tensor product of truncated occupation spaces."""

    def __init__(self, modes: Sequence, cutoff: int | Mapping[str, int] = 4):
        from .algebra import _coerce_mode

        self.modes: tuple[Mode, ...] = tuple(_coerce_mode(m) for m in modes)
        self.names: tuple[str, ...] = tuple(m.name for m in self.modes)
        self.index: dict[str, int] = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("mode names must be unique")
        dims = []
        for m in self.modes:
            if m.statistics == FERMION:
                dims.append(2)
            else:
                d = cutoff.get(m.name, 4) if isinstance(cutoff, Mapping) else int(cutoff)
                if d < 2:
                    raise ValueError(f"boson cutoff must be >= 2, got {d} for {m.name!r}")
                dims.append(d)
        self.dims: tuple[int, ...] = tuple(dims)
        self.dim: int = int(np.prod(self.dims)) if self.dims else 1
        if self.dim > MAX_DIMENSION:
            raise ValueError(f"total dimension {self.dim} exceeds the desk-scale limit {MAX_DIMENSION}")
        # occupation tuples, row-major with the last mode fastest
        self.occupations = np.array(list(np.ndindex(*self.dims)), dtype=np.int64).reshape(
            self.dim, len(self.dims)
        )
        interior = np.ones(self.dim, dtype=bool)
        for k, m in enumerate(self.modes):
            if m.statistics == BOSON:
                interior &= self.occupations[:, k] <= self.dims[k] - 2
        self.interior_mask = interior

    @classmethod
    def from_algebra(cls, spec: AlgebraSpec, cutoff: int | Mapping[str, int] = 4) -> "FockSpace":
        return cls(spec.modes, cutoff)

    def basis_index(self, occupation: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(int(n) for n in occupation), self.dims))

    def occupation_of(self, index: int) -> tuple[int, ...]:
        return tuple(int(n) for n in self.occupations[index])

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def __repr__(self) -> str:
        pairs = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.dims))
        return f"FockSpace({pairs}; dim={self.dim})"


@dataclass
class MatrixOperator:
    """Complex matrix tagged with the space it acts on."""

    space: FockSpace
    array: np.ndarray

    def __post_init__(self):
        self.array = np.asarray(self.array, dtype=complex)
        if self.array.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {self.array.shape} does not match space dimension {self.space.dim}"
            )

    def _check(self, other: "MatrixOperator") -> None:
        if other.space is not self.space and other.space.dims != self.space.dims:
            raise ValueError("operators act on different spaces")

    def __matmul__(self, other: "MatrixOperator") -> "MatrixOperator":
        self._check(other)
        return MatrixOperator(self.space, self.array @ other.array)

    def __add__(self, other: "MatrixOperator") -> "MatrixOperator":
        self._check(other)
        return MatrixOperator(self.space, self.array + other.array)

    def __sub__(self, other: "MatrixOperator") -> "MatrixOperator":
        self._check(other)
        return MatrixOperator(self.space, self.array - other.array)

    def __mul__(self, scalar) -> "MatrixOperator":
        return MatrixOperator(self.space, self.array * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "MatrixOperator":
        return MatrixOperator(self.space, -self.array)

    def dagger(self) -> "MatrixOperator":
        return MatrixOperator(self.space, self.array.conj().T)

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.array))

    @classmethod
    def identity(cls, space: FockSpace) -> "MatrixOperator":
        return cls(space, np.eye(space.dim, dtype=complex))

    @classmethod
    def zeros(cls, space: FockSpace) -> "MatrixOperator":
        return cls(space, np.zeros((space.dim, space.dim), dtype=complex))


def _local_annihilator(dim: int, statistics: str) -> np.ndarray:
    if statistics == FERMION:
        return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(n)
    return a


def ladder_matrix(space: FockSpace, mode: str, kind: str) -> MatrixOperator:
    """Bare tensor-product ladder operator: identity on every other factor.

    Bare operators of *different* modes commute exactly; statistics between
    modes is entirely a matter of the dressing applied in :func:`evaluate`.
    """
    if mode not in space.index:
        raise UnknownModeError(f"unknown mode {mode!r}")
    if kind not in ("annihilate", "create"):
        raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")
    k = space.index[mode]
    factors = [
        _local_annihilator(d, m.statistics) if i == k else np.eye(d, dtype=complex)
        for i, (d, m) in enumerate(zip(space.dims, space.modes))
    ]
    mat = reduce(np.kron, factors) if factors else np.eye(1, dtype=complex)
    if kind == "create":
        mat = mat.conj().T
    return MatrixOperator(space, mat)


def phase_matrix(
    space: FockSpace,
    exponents: Mapping[str, int] | Sequence[int],
    theta: float,
) -> MatrixOperator:
    """Diagonal phase ``exp(i*theta*sum_k m_k n_k)`` on occupation tuples; unitary."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if isinstance(exponents, Mapping):
        vec = np.zeros(len(space.dims), dtype=np.int64)
        for name, k in exponents.items():
            if name not in space.index:
                raise UnknownModeError(f"unknown mode {name!r}")
            vec[space.index[name]] = int(k)
    else:
        vec = np.asarray(list(exponents), dtype=np.int64)
        if vec.shape != (len(space.dims),):
            raise ValueError("exponent vector length must match the mode count")
    diag = np.exp(1j * theta * (space.occupations @ vec))
    return MatrixOperator(space, np.diag(diag))


def _exchange_diagonal(
    spec: AlgebraSpec, space: FockSpace, amap: Mapping[str, str], name: str, theta: float
) -> np.ndarray:
    """Diagonal realizing the spec's exchange statistics for one mode's annihilator."""
    d = np.ones(space.dim, dtype=complex)
    j = spec.index[name]
    for other in spec.names[:j]:
        u = spec.exchange.get(other, name).eval_at(theta)
        if u != 1:
            occ = space.occupations[:, space.index[amap[other]]]
            d = d * (u ** occ)
    return d


def evaluate(
    e: OpExpr,
    spec: AlgebraSpec,
    space: FockSpace,
    theta: float,
    assignment: Mapping[str, str] | None = None,
) -> MatrixOperator:
    """Matrix of a symbolic expression at ``q = exp(i*theta)``.

    Linear in ``e``; a word maps to the matrix product of its atoms in written
    order.  Each symbolic annihilator is represented as (exchange diagonal) x
    (bare annihilator) so that the matrices satisfy the spec's cross-mode
    relations exactly; creators are the matrix adjoints of those images.

    ``assignment`` maps symbolic mode names to space mode names (default: the
    identity); statistics must match.  For a spec with specialized q, ``theta``
    must agree with the specialized value.
    """
    e = _coerce_expr(e)
    if spec.q_value is not None:
        expected = complex(spec.q_value)
        if abs(np.exp(1j * theta) - expected) > 1e-9:
            raise ValueError(
                f"theta={theta} is incompatible with the spec's specialized q={spec.q_value}"
            )
    amap = dict(assignment) if assignment else {n: n for n in spec.names}
    for sym, sp in amap.items():
        if sym not in spec.index:
            raise UnknownModeError(f"assignment covers unknown symbolic mode {sym!r}")
        if sp not in space.index:
            raise UnknownModeError(f"assignment targets unknown space mode {sp!r}")
        if spec.statistics(sym) != space.modes[space.index[sp]].statistics:
            raise ValueError(f"statistics mismatch for mode {sym!r} -> {sp!r}")
    if len(set(amap.values())) != len(amap):
        raise ValueError("mode assignment must be injective")

    ann_images: dict[str, np.ndarray] = {}

    def ann_image(name: str) -> np.ndarray:
        if name not in ann_images:
            if name not in amap:
                raise UnknownModeError(f"symbolic mode {name!r} has no space assignment")
            bare = ladder_matrix(space, amap[name], "annihilate").array
            diag = _exchange_diagonal(spec, space, amap, name, theta)
            ann_images[name] = diag[:, None] * bare
        return ann_images[name]

    total = np.zeros((space.dim, space.dim), dtype=complex)
    for word, coeff in e.terms.items():
        acc = np.eye(space.dim, dtype=complex)
        for atom in word:
            if atom[0] == "a":
                acc = acc @ ann_image(atom[1])
            elif atom[0] == "c":
                acc = acc @ ann_image(atom[1]).conj().T
            else:
                exps = {amap[n]: k for n, k in atom[1]}
                acc = acc @ phase_matrix(space, exps, theta).array
        total += coeff.eval_at(theta) * acc
    return MatrixOperator(space, total)


@dataclass(frozen=True)
class CheckReport:
    """Zero-check result; ``passed`` compares the interior residual to ``tol``."""

    norm: str
    full_residual: float
    interior_residual: float
    tol: float
    passed: bool
    defects: tuple[tuple[tuple[int, ...], complex], ...]

    def describe(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"{status}: interior {self.interior_residual:.3e}, "
            f"full {self.full_residual:.3e} ({self.norm}, tol {self.tol:.1e})"
        )


def check_zero(x: MatrixOperator, tol: float = 1e-12) -> CheckReport:
    """Residual report for ``x ~ 0``.

    The interior residual restricts ``x`` to basis states with every boson
    occupation <= D-2, where truncation artifacts of a mode's own commutation
    relation cannot reach; the full-space residual and the largest diagonal
    defects outside the interior are reported as diagnostics.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    arr = x.array
    full = float(np.linalg.norm(arr))
    mask = x.space.interior_mask
    idx = np.where(mask)[0]
    interior = float(np.linalg.norm(arr[np.ix_(idx, idx)])) if idx.size else 0.0
    outside = np.where(~mask)[0]
    diag = arr.diagonal()
    ranked = sorted(outside, key=lambda i: -abs(diag[i]))[:3]
    defects = tuple(
        (x.space.occupation_of(i), complex(diag[i])) for i in ranked if abs(diag[i]) > 0
    )
    return CheckReport(
        norm="frobenius",
        full_residual=full,
        interior_residual=interior,
        tol=tol,
        passed=interior <= tol,
        defects=defects,
    )


@dataclass(frozen=True)
class NormResult:
    """Squared norm of a creation word applied to the vacuum."""

    norm2: float
    truncated: bool


def state_norm2(space: FockSpace, creators: Sequence[str]) -> NormResult:
    """``|| a+_{m1} ... a+_{mk} |0> ||^2`` for the given mode-name word.

    A boson occupation pushed past the cutoff flags ``truncated`` (the creator
    annihilates the top state); a repeated fermion creator gives an honest
    zero without the flag.
    """
    counts: dict[str, int] = {}
    for name in creators:
        if name not in space.index:
            raise UnknownModeError(f"unknown mode {name!r}")
        counts[name] = counts.get(name, 0) + 1
    truncated = any(
        space.modes[space.index[n]].statistics == BOSON and c > space.dims[space.index[n]] - 1
        for n, c in counts.items()
    )
    v = space.vacuum()
    for name in reversed(list(creators)):
        v = ladder_matrix(space, name, "create").array @ v
    return NormResult(norm2=float(np.vdot(v, v).real), truncated=truncated)
