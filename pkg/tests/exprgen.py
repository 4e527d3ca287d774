"""Seeded random expressions shared by the property and oracle-equivalence tests.

Words are constrained so that, applied to any basis state of the interior
subspace (boson occupations <= D-2), intermediate occupations never exceed the
cutoff: per mode, the running creation surplus may overshoot
max(0, net surplus) by at most one unit.  Within that envelope the truncated
matrix representation reproduces the algebra exactly, which is what makes the
symbolic/numeric cross-checks sharp.
"""

from __future__ import annotations

import random
from fractions import Fraction

from kleinkit import BOSON, AlgebraSpec, OpExpr, UnitScalar, ann, cre, phase
from kleinkit.qscalar import GaussianRational, qpow


def oracle_spec() -> AlgebraSpec:
    """Three bosonic modes with mixed exchange statistics, formal q."""
    return AlgebraSpec(
        [("a", BOSON), ("b", BOSON), ("c", BOSON)],
        {("a", "b"): qpow(1), ("a", "c"): -1, ("b", "c"): qpow(-1)},
    )


def _overshoot_ok(kinds_by_mode: dict[str, list[str]], cap: int = 1) -> bool:
    for kinds in kinds_by_mode.values():
        running = peak = 0
        for kind in reversed(kinds):  # atoms act on the ket right to left
            running += 1 if kind == "c" else -1
            peak = max(peak, running)
        if peak > max(0, running) + cap:
            return False
    return True


def random_word(rng: random.Random, spec: AlgebraSpec, max_len: int = 6) -> OpExpr:
    names = spec.names
    for _ in range(80):
        length = rng.randint(1, max_len)
        atoms = []
        kinds_by_mode: dict[str, list[str]] = {n: [] for n in names}
        for _ in range(length):
            if rng.random() < 0.15:
                items = {n: rng.randint(-2, 2) for n in rng.sample(names, rng.randint(1, len(names)))}
                atoms.append(("phase", items))
                continue
            name = rng.choice(names)
            kind = rng.choice(["a", "c"])
            atoms.append((kind, name))
            kinds_by_mode[name].append(kind)
        if not _overshoot_ok(kinds_by_mode):
            continue
        word = OpExpr.one()
        for atom in atoms:
            if atom[0] == "phase":
                word = word * phase(atom[1])
            elif atom[0] == "a":
                word = word * ann(atom[1])
            else:
                word = word * cre(atom[1])
        return word
    raise RuntimeError("could not sample a word within the overshoot envelope")


def random_coeff(rng: random.Random, allow_q: bool = True) -> UnitScalar:
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    c = GaussianRational(Fraction(num, rng.randint(1, 3)))
    k = rng.randint(-2, 2) if allow_q else 0
    return UnitScalar.q_power(k, c)


def random_expr(
    rng: random.Random, spec: AlgebraSpec, max_terms: int = 3, max_len: int = 6
) -> OpExpr:
    total = OpExpr.zero()
    for _ in range(rng.randint(1, max_terms)):
        total = total + random_coeff(rng, allow_q=spec.is_formal) * random_word(rng, spec, max_len)
    return total


def random_nonzero_monomial(rng: random.Random, spec: AlgebraSpec) -> OpExpr:
    """A canonical monomial, hence symbolically nonzero, with a visibly large matrix.

    Per-mode ladder powers stay <= 2 so the monomial has an exact unit-scale
    matrix element between interior states at cutoff D = 4.
    """
    out = OpExpr.one()
    placed = False
    for name in spec.names:
        p, r = rng.choice([(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)])
        if p or r:
            placed = True
        out = out * cre(name) ** p * ann(name) ** r
    if rng.random() < 0.5:
        out = out * phase({rng.choice(spec.names): rng.randint(-1, 1)})
    if not placed:
        out = out * cre(spec.names[0])
    return random_coeff(rng, allow_q=spec.is_formal) * out
