"""Parity and q-parity dressing transformations of ladder algebras.

A :class:`DressingMap` sends each annihilator to ``scale * Phi(m) * a`` for a
per-mode unit scale and phase-exponent vector ``m`` (creators follow by
adjoint).  Such dressings change the *mutual* exchange statistics of distinct
modes while preserving each mode's own ladder relations; the induced exchange
matrix has the closed form

    Q'_ij = Q_ij * q**(m^(j)_i - m^(i)_j)      (modes i before j)

which :func:`verify_klein` certifies symbolically relation by relation.

Catalog (``standard_map``):

==========================  =====================================================
name                        dressing
==========================  =====================================================
total-parity-on-b           2 modes; second mode dressed by the total parity
q-total-on-b                alias of the same exponent pattern, formal-q reading
eta-b-on-both               2 modes; both dressed by the second mode's parity
q-etab-on-both              alias, formal-q reading
eta-a-on-b                  2 modes; second mode dressed by the first's parity
cascade                     n modes; mode i dressed by parities of modes < i
q-cascade                   alias, formal-q reading
total-parity-on-primed      4 fermionic modes; modes 3,4 dressed by total parity
charge-parity               4 fermionic modes; modes 3,4 dressed by the charge
                            parity (exponents -1,+1,-1,+1)
==========================  =====================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import (
    AlgebraSpec,
    ExchangeMatrix,
    FERMION,
    OpExpr,
    UnitScalar,
    ann,
    dagger,
    normal_order,
    phase,
    render,
    substitute,
)


class UnknownMapError(ValueError):
    """Requested catalog name does not exist."""


class ArityError(ValueError):
    """Spec does not have the shape (mode count / statistics) the map needs."""


@dataclass(frozen=True)
class DressingMap:
    """Per-mode Klein dressing ``a_i -> scale_i * Phi(m^(i)) * a_i``."""

    modes: tuple[str, ...]
    exponents: tuple[tuple[int, ...], ...]
    scales: tuple[UnitScalar, ...] = ()

    def __post_init__(self):
        if not self.scales:
            object.__setattr__(self, "scales", tuple(UnitScalar.one() for _ in self.modes))
        if len(self.exponents) != len(self.modes) or len(self.scales) != len(self.modes):
            raise ValueError("dressing rows must match the mode list")
        for row in self.exponents:
            if len(row) != len(self.modes):
                raise ValueError("each exponent row must cover every mode")
        for s in self.scales:
            if s.as_unit_monomial() is None:
                raise ValueError(f"dressing scales must be unit monomials, got {s}")

    @classmethod
    def identity(cls, modes: Sequence[str]) -> "DressingMap":
        n = len(modes)
        return cls(tuple(modes), tuple((0,) * n for _ in range(n)))

    @classmethod
    def from_rows(
        cls,
        modes: Sequence[str],
        rows: Mapping[str, Sequence[int]],
        scales: Mapping[str, UnitScalar] | None = None,
    ) -> "DressingMap":
        modes = tuple(modes)
        n = len(modes)
        exps = tuple(tuple(int(k) for k in rows.get(m, (0,) * n)) for m in modes)
        scl = tuple((scales or {}).get(m, UnitScalar.one()) for m in modes)
        return cls(modes, exps, scl)

    def row(self, name: str) -> dict[str, int]:
        i = self.modes.index(name)
        return {m: k for m, k in zip(self.modes, self.exponents[i]) if k != 0}

    def substitution(self) -> dict[str, OpExpr]:
        """The generator assignment realizing this dressing."""
        out: dict[str, OpExpr] = {}
        for i, name in enumerate(self.modes):
            image = phase(dict(zip(self.modes, self.exponents[i]))) * ann(name)
            out[name] = self.scales[i] * image
        return out

    def compose(self, other: "DressingMap") -> "DressingMap":
        """Dressing equivalent to applying ``self`` and then ``other``.

        Phase generators pass through substitution unchanged, so composition
        adds exponent rows and multiplies scales (order-independent).
        """
        if other.modes != self.modes:
            raise ValueError("can only compose dressings over the same mode list")
        exps = tuple(
            tuple(a + b for a, b in zip(r1, r2))
            for r1, r2 in zip(self.exponents, other.exponents)
        )
        scales = tuple(s1 * s2 for s1, s2 in zip(self.scales, other.scales))
        return DressingMap(self.modes, exps, scales)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ArityError(message)


def _cascade_rows(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 if k < i else 0 for k in range(n)) for i in range(n))


def _two_mode(spec: AlgebraSpec, row_a: tuple[int, int], row_b: tuple[int, int]) -> DressingMap:
    _require(len(spec.names) == 2, "this map needs exactly 2 modes")
    return DressingMap(spec.names, (row_a, row_b))


def _four_fermion(spec: AlgebraSpec, primed_row: tuple[int, int, int, int]) -> DressingMap:
    _require(len(spec.names) == 4, "this map needs exactly 4 modes")
    _require(
        all(m.statistics == FERMION for m in spec.modes),
        "this map needs 4 fermionic modes",
    )
    zero = (0, 0, 0, 0)
    return DressingMap(spec.names, (zero, zero, primed_row, primed_row))


_CATALOG: dict[str, tuple[str, object]] = {
    "total-parity-on-b": (
        "2 modes: dress the second mode with the total number parity",
        lambda spec: _two_mode(spec, (0, 0), (1, 1)),
    ),
    "q-total-on-b": (
        "2 modes: dress the second mode with the total q-parity q**N",
        lambda spec: _two_mode(spec, (0, 0), (1, 1)),
    ),
    "eta-b-on-both": (
        "2 modes: dress both modes with the second mode's parity",
        lambda spec: _two_mode(spec, (0, 1), (0, 1)),
    ),
    "q-etab-on-both": (
        "2 modes: dress both modes with the second mode's q-parity",
        lambda spec: _two_mode(spec, (0, 1), (0, 1)),
    ),
    "eta-a-on-b": (
        "2 modes: dress the second mode with the first mode's parity",
        lambda spec: _two_mode(spec, (0, 0), (1, 0)),
    ),
    "cascade": (
        "n modes: dress mode i with the parities of all earlier modes",
        lambda spec: DressingMap(spec.names, _cascade_rows(len(spec.names))),
    ),
    "q-cascade": (
        "n modes: dress mode i with the q-parities of all earlier modes",
        lambda spec: DressingMap(spec.names, _cascade_rows(len(spec.names))),
    ),
    "total-parity-on-primed": (
        "4 fermionic modes: dress modes 3 and 4 with the total number parity",
        lambda spec: _four_fermion(spec, (1, 1, 1, 1)),
    ),
    "charge-parity": (
        "4 fermionic modes: dress modes 3 and 4 with the charge parity (-1,+1,-1,+1)",
        lambda spec: _four_fermion(spec, (-1, 1, -1, 1)),
    ),
}


def list_standard_maps() -> tuple[tuple[str, str], ...]:
    """Catalog names with one-line descriptions."""
    return tuple((name, desc) for name, (desc, _) in sorted(_CATALOG.items()))


def standard_map(name: str, spec: AlgebraSpec) -> DressingMap:
    """Build a catalog dressing for ``spec``; raises on unknown name or arity mismatch."""
    try:
        _, builder = _CATALOG[name]
    except KeyError:
        known = ", ".join(sorted(_CATALOG))
        raise UnknownMapError(f"unknown map {name!r} (known: {known})") from None
    return builder(spec)


def apply_dressing(dm: DressingMap, e: OpExpr, spec: AlgebraSpec) -> OpExpr:
    """Image of ``e`` under the dressing, normal-ordered over ``spec``."""
    return substitute(e, dm.substitution(), spec)


def induced_exchange(dm: DressingMap, exchange: ExchangeMatrix) -> ExchangeMatrix:
    """Exchange matrix satisfied by the dressed generators.

    Moving an annihilator of mode i past the phase ``Phi(m^(j))`` costs
    ``q**(m^(j)_i)``, which yields ``Q'_ij = Q_ij * q**(m^(j)_i - m^(i)_j)``
    for i before j; scales cancel.  :func:`verify_klein` re-derives this
    relation symbolically, so the closed form is independently certified.
    """
    if exchange.names != dm.modes:
        raise ValueError("dressing and exchange matrix must share the mode order")
    idx = {n: i for i, n in enumerate(dm.modes)}
    entries = {}
    for a, b in exchange.pairs():
        shift = dm.exponents[idx[b]][idx[a]] - dm.exponents[idx[a]][idx[b]]
        entries[(a, b)] = exchange.get(a, b) * UnitScalar.q_power(shift)
    return ExchangeMatrix(dm.modes, entries)


@dataclass(frozen=True)
class CheckEntry:
    """One certified relation of a dressing verification."""

    kind: str
    modes: tuple[str, ...]
    passed: bool
    witness: str | None
    residual: OpExpr = field(repr=False, compare=False, default=None)

    def describe(self) -> str:
        status = "pass" if self.passed else "FAIL"
        where = ",".join(self.modes)
        tail = "" if self.passed else f" residual {self.witness}"
        return f"{self.kind}[{where}]: {status}{tail}"


@dataclass(frozen=True)
class ExchangeReport:
    """Outcome of :func:`verify_klein`: induced matrix plus per-relation status."""

    induced: ExchangeMatrix
    entries: tuple[CheckEntry, ...]

    @property
    def all_pass(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def failures(self) -> tuple[CheckEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)

    def to_dict(self) -> dict:
        return {
            "induced": self.induced.to_dict(),
            "all_pass": self.all_pass,
            "checks": [
                {
                    "kind": e.kind,
                    "modes": list(e.modes),
                    "pass": e.passed,
                    "witness": e.witness,
                }
                for e in self.entries
            ],
        }

    def render(self) -> str:
        return "\n".join(e.describe() for e in self.entries)


def verify_klein(
    dm: DressingMap,
    spec_in: AlgebraSpec,
    expected: ExchangeMatrix | None = None,
) -> ExchangeReport:
    """Certify a dressing symbolically against an expected exchange matrix.

    Checks, all exact (empty normal form):

    * per mode: the mode's own ladder relation is preserved
      (``[a~, a~+] = 1`` for bosons, ``{a~, a~+} = 1`` and nilpotence for
      fermions);
    * per mode pair i < j: ``a~_i a~_j = Q'_ij a~_j a~_i`` and
      ``a~_i a~_j+ = Q'_ij^-1 a~_j+ a~_i``;
    * per mode pair: the dressed number operators commute.

    Failures become report entries (with rendered residual witnesses), never
    exceptions.
    """
    if expected is None:
        expected = induced_exchange(dm, spec_in.exchange)
    subs = dm.substitution()
    images = {name: substitute(ann(name), subs, spec_in) for name in dm.modes}
    images_dag = {name: normal_order(dagger(images[name]), spec_in) for name in dm.modes}
    entries: list[CheckEntry] = []

    def record(kind: str, modes: tuple[str, ...], raw: OpExpr) -> None:
        # entries keep the raw residual so a numeric backend can re-check it
        # along an independent route
        nf = normal_order(raw, spec_in)
        passed = not nf.terms
        witness = None if passed else render(nf, spec_in)
        entries.append(CheckEntry(kind, modes, passed, witness, raw))

    one = OpExpr.one()
    for name in dm.modes:
        x, xd = images[name], images_dag[name]
        if spec_in.is_fermion(name):
            record("car", (name,), x * xd + xd * x - one)
            record("nilpotent", (name,), x * x)
        else:
            record("ccr", (name,), x * xd - xd * x - one)

    for a, b in expected.pairs():
        q_ab = spec_in.canon_scalar(expected.get(a, b))
        record("pair-ann", (a, b), images[a] * images[b] - q_ab * (images[b] * images[a]))
        record(
            "pair-cre",
            (a, b),
            images[a] * images_dag[b] - q_ab.inverse() * (images_dag[b] * images[a]),
        )
        n_a = images_dag[a] * images[a]
        n_b = images_dag[b] * images[b]
        record("number-comm", (a, b), n_a * n_b - n_b * n_a)

    return ExchangeReport(expected, tuple(entries))
