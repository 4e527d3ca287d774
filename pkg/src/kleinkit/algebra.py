"""Multi-mode ladder-operator expressions and their canonical normal form.

Expressions are finite linear combinations of *words*; a word is a tuple of
atoms.  Atoms are

* ``("a", name)`` -- annihilator of the named mode,
* ``("c", name)`` -- creator of the named mode,
* ``("p", items)`` -- diagonal phase generator ``Phi(m) = prod_k q**(m_k N_k)``
  with ``items`` a name-sorted tuple of ``(mode, exponent)`` pairs.

An :class:`AlgebraSpec` fixes the mode list (with per-mode boson/fermion
statistics), the cross-mode exchange matrix ``Q`` and the deformation mode
(formal ``q`` or an exact unit value such as -1).  Normal ordering rewrites a
word with the relations

* same mode, boson:    ``a a+ -> a+ a + 1``
* same mode, fermion:  ``a a+ -> 1 - a+ a``  and  ``a a -> 0``, ``a+ a+ -> 0``
* cross mode, i < j:   ``a_j a_i -> Q_ij^-1 a_i a_j`` (same kinds) and
  ``a_j a_i+ -> Q_ij a_i+ a_j`` (mixed kinds), with the creator variants
  obtained by taking adjoints
* phases:              ``Phi(m) a_k -> q**(-m_k) a_k Phi(m)``,
  ``Phi(m) a_k+ -> q**(+m_k) a_k+ Phi(m)``, ``Phi(m) Phi(m') -> Phi(m+m')``

until modes ascend left to right, creators precede annihilators within each
mode, and at most one phase factor remains at the right end.  Every rewrite
strictly decreases (inversions, phase-displacement, word length), so the
procedure terminates; the resulting monomials form a basis, so an expression
is zero exactly when its normal form has no terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .qscalar import GaussianLike, GaussianRational, ScalarLike, UnitScalar

BOSON = "boson"
FERMION = "fermion"

_ANN = "a"
_CRE = "c"
_PHASE = "p"

Atom = tuple
Word = tuple
PhaseItems = tuple


class UnknownModeError(ValueError):
    """An expression refers to a mode the spec does not declare."""


class MissingGeneratorError(ValueError):
    """A substitution does not cover a generator occurring in the expression."""


class Mode(NamedTuple):
    name: str
    statistics: str


def _coerce_mode(value) -> Mode:
    if isinstance(value, Mode):
        mode = value
    else:
        name, statistics = value
        mode = Mode(str(name), str(statistics))
    if mode.statistics not in (BOSON, FERMION):
        raise ValueError(f"unknown statistics {mode.statistics!r} for mode {mode.name!r}")
    return mode


class ExchangeMatrix:
    """Cross-mode exchange factors ``Q_ij`` (unit monomials), stored for i < j.

    Encodes ``a_i a_j = Q_ij a_j a_i`` and ``a_i a_j+ = Q_ij^-1 a_j+ a_i`` for
    modes ``i`` before ``j`` in declaration order.  Unspecified pairs default
    to 1 (plain mutual commutation); ``Q_ji`` is implicitly ``Q_ij^-1``.
    """

    __slots__ = ("names", "_index", "_entries")

    def __init__(self, names: Sequence[str], entries: Mapping[tuple[str, str], ScalarLike] | None = None):
        self.names = tuple(names)
        self._index = {n: i for i, n in enumerate(self.names)}
        if len(self._index) != len(self.names):
            raise ValueError("mode names must be unique")
        self._entries: dict[tuple[str, str], UnitScalar] = {}
        for (a, b), value in (entries or {}).items():
            self._set(a, b, UnitScalar.coerce(value))

    def _set(self, a: str, b: str, value: UnitScalar) -> None:
        if a not in self._index or b not in self._index:
            raise UnknownModeError(f"exchange entry for undeclared mode pair ({a}, {b})")
        if a == b:
            if not value.is_one:
                raise ValueError(f"diagonal exchange entry for {a!r} must be 1")
            return
        if value.as_unit_monomial() is None:
            raise ValueError(f"exchange entry Q[{a},{b}] must be a unit monomial, got {value}")
        if self._index[a] > self._index[b]:
            a, b, value = b, a, value.inverse()
        key = (a, b)
        if key in self._entries and self._entries[key] != value:
            raise ValueError(f"conflicting exchange entries for pair ({a}, {b})")
        self._entries[key] = value

    @classmethod
    def uniform(cls, names: Sequence[str], value: ScalarLike) -> "ExchangeMatrix":
        names = tuple(names)
        value = UnitScalar.coerce(value)
        entries = {}
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                entries[(a, b)] = value
        return cls(names, entries)

    def get(self, a: str, b: str) -> UnitScalar:
        """``Q_ab`` for any argument order (``Q_ba = Q_ab^-1``, ``Q_aa = 1``)."""
        if a not in self._index or b not in self._index:
            raise UnknownModeError(f"unknown mode in exchange lookup ({a}, {b})")
        if a == b:
            return UnitScalar.one()
        if self._index[a] < self._index[b]:
            return self._entries.get((a, b), UnitScalar.one())
        return self._entries.get((b, a), UnitScalar.one()).inverse()

    def pairs(self) -> Iterator[tuple[str, str]]:
        names = self.names
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                yield a, b

    def canonicalized(self, spec: "AlgebraSpec") -> "ExchangeMatrix":
        """Entries with the spec's q-specialization applied."""
        return ExchangeMatrix(
            self.names, {pair: spec.canon_scalar(self.get(*pair)) for pair in self.pairs()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExchangeMatrix):
            return NotImplemented
        return self.names == other.names and all(
            self.get(a, b) == other.get(a, b) for a, b in self.pairs()
        )

    def __hash__(self):
        return hash((self.names, tuple(sorted((k, v.items()) for k, v in self._entries.items()))))

    def to_dict(self) -> dict[str, str]:
        return {f"{a},{b}": str(self.get(a, b)) for a, b in self.pairs()}

    def __repr__(self) -> str:
        return f"ExchangeMatrix({self.to_dict()})"


class AlgebraSpec:
    """Mode list, exchange matrix, and deformation mode for the rewriter.

    ``q`` may be None (formal deformation parameter) or an exact unit-modulus
    Gaussian rational (for example -1) to which every ``q`` power is
    specialized during normal ordering.  For specialized values of finite
    multiplicative order (1, -1, +-i) phase exponents are reduced modulo that
    order, so e.g. the square of a number-parity dressing is the identity.
    """

    __slots__ = ("modes", "names", "index", "exchange", "q_value", "q_order")

    def __init__(
        self,
        modes: Iterable,
        exchange: ExchangeMatrix | Mapping | None = None,
        q: GaussianLike | None = None,
    ):
        self.modes: tuple[Mode, ...] = tuple(_coerce_mode(m) for m in modes)
        self.names: tuple[str, ...] = tuple(m.name for m in self.modes)
        self.index: dict[str, int] = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("mode names must be unique")
        if isinstance(exchange, ExchangeMatrix):
            if exchange.names != self.names:
                raise ValueError("exchange matrix mode order must match the spec")
            self.exchange = exchange
        else:
            self.exchange = ExchangeMatrix(self.names, exchange)
        if q is None:
            self.q_value = None
            self.q_order = None
        else:
            value = GaussianRational.coerce(q)
            if value.norm2() != 1:
                raise ValueError(f"specialized q must have unit modulus, got {value}")
            self.q_value = value
            order = None
            acc = value
            for n in (1, 2, 3, 4):
                if acc == GaussianRational(1):
                    order = n
                    break
                acc = acc * value
            self.q_order = order

    @property
    def is_formal(self) -> bool:
        return self.q_value is None

    @property
    def theta(self) -> float | None:
        """Angle of the specialized q value, or None when formal."""
        if self.q_value is None:
            return None
        return math.atan2(float(self.q_value.im), float(self.q_value.re))

    def statistics(self, name: str) -> str:
        try:
            return self.modes[self.index[name]].statistics
        except KeyError:
            raise UnknownModeError(f"unknown mode {name!r}") from None

    def is_fermion(self, name: str) -> bool:
        return self.statistics(name) == FERMION

    def canon_scalar(self, s: UnitScalar) -> UnitScalar:
        return s if self.q_value is None else s.substitute_unit(self.q_value)

    def canon_phase_items(self, items: Iterable[tuple[str, int]]) -> PhaseItems:
        acc: dict[str, int] = {}
        for name, k in items:
            acc[name] = acc.get(name, 0) + int(k)
        if self.q_order is not None:
            acc = {n: k % self.q_order for n, k in acc.items()}
        return tuple(sorted((n, k) for n, k in acc.items() if k != 0))

    def canon_word(self, word: Word) -> Word:
        out = []
        for atom in word:
            if atom[0] == _PHASE:
                items = self.canon_phase_items(atom[1])
                if items:
                    out.append((_PHASE, items))
            else:
                out.append(atom)
        return tuple(out)

    def __repr__(self) -> str:
        qs = "formal" if self.q_value is None else str(self.q_value)
        return f"AlgebraSpec(modes={list(self.names)}, q={qs})"


def _merge_phase_items(items: Iterable[tuple[str, int]]) -> PhaseItems:
    acc: dict[str, int] = {}
    for name, k in items:
        acc[name] = acc.get(name, 0) + int(k)
    return tuple(sorted((n, k) for n, k in acc.items() if k != 0))


class OpExpr:
    """Linear combination of generator words with :class:`UnitScalar` coefficients.

    Purely structural: construction and arithmetic never consult an
    :class:`AlgebraSpec`; only :func:`normal_order` and friends do.  The zero
    expression has an empty term mapping.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, ScalarLike] | None = None):
        data: dict[Word, UnitScalar] = {}
        for word, coeff in (terms or {}).items():
            coeff = UnitScalar.coerce(coeff)
            if not coeff.is_zero:
                data[tuple(word)] = coeff
        self.terms = data

    @classmethod
    def zero(cls) -> "OpExpr":
        return cls()

    @classmethod
    def one(cls) -> "OpExpr":
        return cls({(): UnitScalar.one()})

    @classmethod
    def scalar(cls, value: ScalarLike) -> "OpExpr":
        return cls({(): UnitScalar.coerce(value)})

    @classmethod
    def from_word(cls, word: Word, coeff: ScalarLike = 1) -> "OpExpr":
        return cls({tuple(word): UnitScalar.coerce(coeff)})

    @property
    def is_zero_expr(self) -> bool:
        """Structurally zero (empty term list); see :func:`is_zero` for the semantic test."""
        return not self.terms

    def __add__(self, other) -> "OpExpr":
        other = _coerce_expr(other)
        data = dict(self.terms)
        for word, coeff in other.terms.items():
            s = data.get(word, UnitScalar.zero()) + coeff
            if s.is_zero:
                data.pop(word, None)
            else:
                data[word] = s
        return OpExpr(data)

    __radd__ = __add__

    def __sub__(self, other) -> "OpExpr":
        return self + (-_coerce_expr(other))

    def __rsub__(self, other) -> "OpExpr":
        return _coerce_expr(other) + (-self)

    def __neg__(self) -> "OpExpr":
        return OpExpr({w: -c for w, c in self.terms.items()})

    def __mul__(self, other) -> "OpExpr":
        if isinstance(other, (int, UnitScalar, GaussianRational)) or not isinstance(other, OpExpr):
            try:
                scalar = UnitScalar.coerce(other)
            except TypeError:
                return NotImplemented
            return OpExpr({w: c * scalar for w, c in self.terms.items()})
        data: dict[Word, UnitScalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = data.get(w, UnitScalar.zero()) + c1 * c2
                if s.is_zero:
                    data.pop(w, None)
                else:
                    data[w] = s
        return OpExpr(data)

    def __rmul__(self, other) -> "OpExpr":
        # only scalars commute past words
        try:
            scalar = UnitScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return OpExpr({w: scalar * c for w, c in self.terms.items()})

    def __pow__(self, n: int) -> "OpExpr":
        if not isinstance(n, int) or n < 0:
            raise ValueError("operator powers must be nonnegative integers")
        out = OpExpr.one()
        for _ in range(n):
            out = out * self
        return out

    def mode_names(self) -> set[str]:
        names: set[str] = set()
        for word in self.terms:
            for atom in word:
                if atom[0] == _PHASE:
                    names.update(n for n, _ in atom[1])
                else:
                    names.add(atom[1])
        return names

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpExpr):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:
        return f"OpExpr({len(self.terms)} terms)"


ExprLike = Union[OpExpr, ScalarLike]


def _coerce_expr(value: ExprLike) -> OpExpr:
    if isinstance(value, OpExpr):
        return value
    return OpExpr.scalar(UnitScalar.coerce(value))


def ann(name: str) -> OpExpr:
    """Annihilator of the named mode."""
    return OpExpr.from_word(((_ANN, name),))


def cre(name: str) -> OpExpr:
    """Creator of the named mode."""
    return OpExpr.from_word(((_CRE, name),))


def phase(exponents: Mapping[str, int] | Iterable[tuple[str, int]]) -> OpExpr:
    """Diagonal phase generator ``prod_k q**(m_k N_k)`` for the given exponents."""
    items = exponents.items() if isinstance(exponents, Mapping) else exponents
    merged = _merge_phase_items(items)
    if not merged:
        return OpExpr.one()
    return OpExpr.from_word(((_PHASE, merged),))


def number(name: str) -> OpExpr:
    """Number operator ``a+ a`` of the named mode."""
    return cre(name) * ann(name)


def _dagger_atom(atom: Atom) -> Atom:
    kind = atom[0]
    if kind == _ANN:
        return (_CRE, atom[1])
    if kind == _CRE:
        return (_ANN, atom[1])
    return (_PHASE, tuple(sorted((n, -k) for n, k in atom[1])))


def dagger(e: ExprLike) -> OpExpr:
    """Structural adjoint: reverse words, dagger atoms, conjugate scalars.

    No normal ordering is applied; see :func:`adjoint` for the canonical form.
    """
    e = _coerce_expr(e)
    return OpExpr({tuple(_dagger_atom(a) for a in reversed(w)): c.conj() for w, c in e.terms.items()})


def _check_modes(e: OpExpr, spec: AlgebraSpec) -> None:
    unknown = e.mode_names() - set(spec.names)
    if unknown:
        raise UnknownModeError(f"expression uses undeclared modes {sorted(unknown)}")


def _phase_exponent(items: PhaseItems, name: str) -> int:
    for n, k in items:
        if n == name:
            return k
    return 0


def _is_redex(x: Atom, y: Atom, spec: AlgebraSpec) -> bool:
    if x[0] == _PHASE:
        return True  # phases merge together and move right past every ladder atom
    if y[0] == _PHASE:
        return False
    ix, iy = spec.index[x[1]], spec.index[y[1]]
    if ix != iy:
        return ix > iy
    if x[0] == _ANN and y[0] == _CRE:
        return True
    return x[0] == y[0] and spec.is_fermion(x[1])


def _rewrite(x: Atom, y: Atom, spec: AlgebraSpec) -> list[tuple[Word, UnitScalar]]:
    one = UnitScalar.one()
    if x[0] == _PHASE:
        if y[0] == _PHASE:
            merged = spec.canon_phase_items(x[1] + y[1])
            return [(((_PHASE, merged),) if merged else (), one)]
        k = _phase_exponent(x[1], y[1])
        factor = UnitScalar.q_power(-k if y[0] == _ANN else k)
        return [((y, x), factor)]
    ix, iy = spec.index[x[1]], spec.index[y[1]]
    if ix == iy:
        if x[0] == y[0]:  # fermion nilpotence
            return []
        if spec.is_fermion(x[1]):  # a a+ -> 1 - a+ a
            return [((), one), ((y, x), UnitScalar.coerce(-1))]
        return [((y, x), one), ((), one)]  # a a+ -> a+ a + 1
    # cross-mode swap; i is the earlier mode, j the later one
    q_ij = spec.exchange.get(y[1], x[1])
    factor = q_ij if x[0] != y[0] else q_ij.inverse()
    return [((y, x), factor)]


def _find_redex(word: Word, spec: AlgebraSpec, from_right: bool) -> int | None:
    positions = range(len(word) - 2, -1, -1) if from_right else range(len(word) - 1)
    for t in positions:
        if _is_redex(word[t], word[t + 1], spec):
            return t
    return None


def normal_order(e: ExprLike, spec: AlgebraSpec, strategy: str = "leftmost") -> OpExpr:
    """Rewrite to the canonical normal-ordered form over ``spec``.

    Idempotent, and independent of the redex-selection ``strategy``
    ("leftmost" or "rightmost"); the two strategies exist to make that
    confluence property testable.
    """
    if strategy not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown strategy {strategy!r}")
    from_right = strategy == "rightmost"
    e = _coerce_expr(e)
    _check_modes(e, spec)
    out: dict[Word, UnitScalar] = {}
    stack: list[tuple[Word, UnitScalar]] = [
        (spec.canon_word(w), c) for w, c in e.terms.items()
    ]
    while stack:
        word, coeff = stack.pop()
        t = _find_redex(word, spec, from_right)
        if t is None:
            coeff = spec.canon_scalar(coeff)
            if coeff.is_zero:
                continue
            s = out.get(word, UnitScalar.zero()) + coeff
            if s.is_zero:
                out.pop(word, None)
            else:
                out[word] = s
            continue
        for segment, factor in _rewrite(word[t], word[t + 1], spec):
            stack.append((word[:t] + segment + word[t + 2 :], coeff * factor))
    return OpExpr(out)


def is_zero(e: ExprLike, spec: AlgebraSpec) -> bool:
    """Exact zero test: true iff the normal form has no terms."""
    return not normal_order(e, spec).terms


def adjoint(e: ExprLike, spec: AlgebraSpec) -> OpExpr:
    """Hermitian adjoint, returned in normal-ordered form."""
    return normal_order(dagger(e), spec)


def bracket(x: ExprLike, y: ExprLike, s: ScalarLike, spec: AlgebraSpec) -> OpExpr:
    """Deformed bracket ``[x, y]_s = x y - s y x``, normal-ordered.

    ``s = 1`` is the commutator, ``s = -1`` the anticommutator, and ``q``
    powers give the deformed variants.
    """
    x, y = _coerce_expr(x), _coerce_expr(y)
    return normal_order(x * y - UnitScalar.coerce(s) * (y * x), spec)


def commutator(x: ExprLike, y: ExprLike, spec: AlgebraSpec) -> OpExpr:
    return bracket(x, y, 1, spec)


def anticommutator(x: ExprLike, y: ExprLike, spec: AlgebraSpec) -> OpExpr:
    return bracket(x, y, -1, spec)


def substitute(e: ExprLike, assignment: Mapping[str, ExprLike], spec_out: AlgebraSpec) -> OpExpr:
    """Homomorphic image of ``e`` under a per-mode generator replacement.

    ``assignment`` maps a mode name to the image of its *annihilator*;
    creators are sent to the structural adjoint of that image, and phase
    generators are left fixed (every catalog dressing preserves mode number
    operators, which is what makes this convention consistent).  The result
    is normal-ordered over ``spec_out``.
    """
    e = _coerce_expr(e)
    images = {name: _coerce_expr(img) for name, img in assignment.items()}
    total = OpExpr.zero()
    for word, coeff in e.terms.items():
        acc = OpExpr.scalar(coeff)
        for atom in word:
            if atom[0] == _PHASE:
                factor = OpExpr.from_word((atom,))
            else:
                name = atom[1]
                if name not in images:
                    raise MissingGeneratorError(f"no image given for generator of mode {name!r}")
                factor = images[name] if atom[0] == _ANN else dagger(images[name])
            acc = acc * factor
        total = total + acc
    return normal_order(total, spec_out)


def vacuum_expectation(e: ExprLike, spec: AlgebraSpec) -> UnitScalar:
    """Coefficient of the ladder-free part of the normal form.

    Annihilators kill the vacuum and phases act trivially on it, so this is
    the exact vacuum matrix element of ``e``.
    """
    nf = normal_order(e, spec)
    total = UnitScalar.zero()
    for word, coeff in nf.terms.items():
        if all(atom[0] == _PHASE for atom in word):
            total = total + coeff
    return spec.canon_scalar(total)


def as_scalar(e: ExprLike) -> UnitScalar | None:
    """The scalar value of an expression with no generators, else None."""
    e = _coerce_expr(e)
    if not e.terms:
        return UnitScalar.zero()
    if set(e.terms) == {()}:
        return e.terms[()]
    return None


def _word_sort_key(word: Word, spec: AlgebraSpec):
    powers = [[0, 0] for _ in spec.names]
    phase_vec = [0] * len(spec.names)
    for atom in word:
        if atom[0] == _CRE:
            powers[spec.index[atom[1]]][0] += 1
        elif atom[0] == _ANN:
            powers[spec.index[atom[1]]][1] += 1
        else:
            for n, k in atom[1]:
                phase_vec[spec.index[n]] += k
    return (tuple(tuple(p) for p in powers), tuple(phase_vec))


def _render_word(word: Word, spec: AlgebraSpec) -> str:
    parts: list[str] = []
    run: Atom | None = None
    count = 0

    def flush():
        if run is None:
            return
        if run[0] == _PHASE:
            vec = [0] * len(spec.names)
            for n, k in run[1]:
                vec[spec.index[n]] = k
            base = "phase[" + ",".join(str(v) for v in vec) + "]"
        else:
            base = ("ad" if run[0] == _CRE else "a") + f"[{run[1]}]"
        parts.append(base if count == 1 else f"{base}^{count}")

    for atom in word:
        if atom == run:
            count += 1
        else:
            flush()
            run, count = atom, 1
    flush()
    return "*".join(parts)


def render(e: ExprLike, spec: AlgebraSpec) -> str:
    """Deterministic text form, e.g. ``"(-1)*ad[b]*phase[1,1]"``; ``"0"`` when empty."""
    e = _coerce_expr(e)
    if not e.terms:
        return "0"
    rendered = []
    for word in sorted(e.terms, key=lambda w: _word_sort_key(w, spec)):
        coeff = e.terms[word]
        if not word:
            rendered.append(f"({coeff})" if not coeff.is_one else "1")
            continue
        body = _render_word(word, spec)
        rendered.append(body if coeff.is_one else f"({coeff})*{body}")
    return " + ".join(rendered)
