import random
from fractions import Fraction

import pytest

from kleinkit import (
    BOSON,
    FERMION,
    AlgebraSpec,
    ExchangeMatrix,
    MissingGeneratorError,
    OpExpr,
    UnknownModeError,
    adjoint,
    ann,
    anticommutator,
    as_scalar,
    bracket,
    commutator,
    cre,
    dagger,
    is_zero,
    normal_order,
    number,
    phase,
    render,
    substitute,
    vacuum_expectation,
)
from kleinkit.qscalar import GaussianRational, UnitScalar, qpow

from exprgen import oracle_spec, random_expr, random_word


def boson_pair(exchange=None, q=None):
    return AlgebraSpec([("a", BOSON), ("b", BOSON)], exchange, q)


def abnormal_pair():
    return boson_pair({("a", "b"): -1}, q=-1)


# --- normal ordering -------------------------------------------------------


def test_boson_ccr_rewrite():
    spec = boson_pair()
    nf = normal_order(ann("a") * cre("a"), spec)
    assert nf == cre("a") * ann("a") + OpExpr.one()


def test_abnormal_cross_mode_swap():
    spec = abnormal_pair()
    nf = normal_order(ann("b") * ann("a"), spec)
    assert nf == -(ann("a") * ann("b"))


def test_phase_moves_right_with_q_factor():
    spec = AlgebraSpec([("a", BOSON), ("b", BOSON)])
    nf = normal_order(phase({"a": 1, "b": 1}) * ann("a"), spec)
    assert nf == qpow(-1) * (ann("a") * phase({"a": 1, "b": 1}))


def test_fermion_ccr_rewrite():
    spec = AlgebraSpec([("c", FERMION)])
    nf = normal_order(ann("c") * cre("c"), spec)
    assert nf == OpExpr.one() - cre("c") * ann("c")


def test_fermion_nilpotence():
    spec = AlgebraSpec([("c", FERMION)])
    assert normal_order(ann("c") * ann("c"), spec).is_zero_expr
    assert normal_order(cre("c") * cre("c"), spec).is_zero_expr


def test_unknown_mode_raises():
    spec = boson_pair()
    with pytest.raises(UnknownModeError):
        normal_order(ann("zz"), spec)


def test_idempotence_on_seeded_samples():
    rng = random.Random(7)
    spec = oracle_spec()
    for _ in range(200):
        e = random_expr(rng, spec, max_terms=3, max_len=6)
        nf = normal_order(e, spec)
        assert normal_order(nf, spec) == nf


def test_confluence_of_reduction_strategies():
    rng = random.Random(11)
    spec = oracle_spec()
    for _ in range(120):
        e = random_expr(rng, spec)
        assert normal_order(e, spec, "leftmost") == normal_order(e, spec, "rightmost")


# --- zero test -------------------------------------------------------------


def test_defining_relation_is_zero():
    spec = abnormal_pair()
    q_ab = spec.exchange.get("a", "b")
    assert is_zero(ann("a") * ann("b") - q_ab * (ann("b") * ann("a")), spec)


def test_ccr_identity_is_zero():
    spec = boson_pair()
    assert is_zero(commutator(ann("a"), cre("a"), spec) - OpExpr.one(), spec)


def test_ccr_minus_two_is_not_zero():
    spec = boson_pair()
    assert not is_zero(commutator(ann("a"), cre("a"), spec) - OpExpr.scalar(2), spec)


# --- adjoint ----------------------------------------------------------------


def test_adjoint_of_dressed_annihilator_at_parity():
    spec = abnormal_pair()
    eta_b = phase({"a": 1, "b": 1}) * ann("b")
    adj = adjoint(eta_b, spec)
    assert adj == normal_order(cre("b") * phase({"a": 1, "b": 1}), spec)
    assert adj == normal_order(-(phase({"a": 1, "b": 1}) * cre("b")), spec)


def test_adjoint_involution():
    spec = boson_pair()
    e = cre("a") * ann("b")
    assert adjoint(adjoint(e, spec), spec) == normal_order(e, spec)


def test_adjoint_involution_random():
    rng = random.Random(23)
    spec = oracle_spec()
    for _ in range(40):
        e = random_expr(rng, spec)
        assert adjoint(adjoint(e, spec), spec) == normal_order(e, spec)


def test_adjoint_is_an_antihomomorphism():
    rng = random.Random(29)
    spec = oracle_spec()
    for _ in range(30):
        x, y = random_word(rng, spec, 3), random_word(rng, spec, 3)
        lhs = adjoint(x * y, spec)
        rhs = normal_order(dagger(y) * dagger(x), spec)
        assert lhs == rhs


def test_adjoint_preserves_zero_of_anticommutator():
    spec = abnormal_pair()
    acomm = ann("a") * ann("b") + ann("b") * ann("a")
    assert is_zero(acomm, spec)
    assert is_zero(adjoint(acomm, spec), spec)


# --- brackets ----------------------------------------------------------------


def test_bracket_commutator_unit():
    spec = boson_pair()
    assert bracket(ann("a"), cre("a"), 1, spec) == OpExpr.one()


def test_bracket_anticommutator_abnormal_pair():
    spec = abnormal_pair()
    assert bracket(ann("a"), ann("b"), -1, spec).is_zero_expr


def test_bracket_antisymmetry_random():
    rng = random.Random(31)
    spec = oracle_spec()
    for _ in range(30):
        x, y = random_expr(rng, spec, 2, 4), random_expr(rng, spec, 2, 4)
        total = bracket(x, y, 1, spec) + bracket(y, x, 1, spec)
        assert normal_order(total, spec).is_zero_expr


def test_exchange_consistency_from_defining_relations():
    rng = random.Random(37)
    units = [UnitScalar.coerce(1), UnitScalar.coerce(-1), qpow(1), qpow(-1), qpow(2, (0, 1))]
    names = ("a", "b", "c")
    for _ in range(20):
        entries = {}
        for i, x in enumerate(names):
            for y in names[i + 1 :]:
                entries[(x, y)] = rng.choice(units)
        spec = AlgebraSpec([(n, BOSON) for n in names], entries)
        for i, x in enumerate(names):
            for y in names[i + 1 :]:
                q_xy = spec.exchange.get(x, y)
                assert is_zero(bracket(ann(x), ann(y), q_xy, spec), spec)
                assert is_zero(bracket(ann(x), cre(y), q_xy.inverse(), spec), spec)


def test_number_operators_commute_for_any_exchange():
    spec = AlgebraSpec(
        [("a", BOSON), ("b", BOSON), ("c", FERMION)],
        {("a", "b"): qpow(1), ("a", "c"): -1, ("b", "c"): qpow(2, (0, 1))},
    )
    for x in spec.names:
        for y in spec.names:
            assert is_zero(commutator(number(x), number(y), spec), spec)


# --- substitution ------------------------------------------------------------


def test_substitute_dressing_image():
    spec = abnormal_pair()
    image = substitute(ann("b"), {"a": ann("a"), "b": phase({"a": 1, "b": 1}) * ann("b")}, spec)
    assert image == normal_order(phase({"a": 1, "b": 1}) * ann("b"), spec)


def test_substitute_identity_assignment():
    spec = boson_pair()
    e = cre("a") * ann("b") * phase({"a": 1})
    identity = {n: ann(n) for n in spec.names}
    assert substitute(e, identity, spec) == normal_order(e, spec)


def test_substitute_is_multiplicative():
    rng = random.Random(41)
    spec = oracle_spec()
    assignment = {
        "a": phase({"b": 1}) * ann("a"),
        "b": qpow(1) * ann("b"),
        "c": phase({"a": -1, "c": 2}) * ann("c"),
    }
    for _ in range(20):
        x, y = random_word(rng, spec, 3), random_word(rng, spec, 3)
        lhs = substitute(x * y, assignment, spec)
        rhs = normal_order(substitute(x, assignment, spec) * substitute(y, assignment, spec), spec)
        assert lhs == rhs


def test_substitute_requires_every_generator():
    spec = boson_pair()
    with pytest.raises(MissingGeneratorError):
        substitute(ann("a") * ann("b"), {"a": ann("a")}, spec)


# --- vacuum expectation -------------------------------------------------------


def _vev_single_mode_oracle(word: str) -> int:
    # exact recursion in the unnormalized basis (a+)^n |0>: a (a+)^n = n (a+)^(n-1)
    state = {0: 1}
    for ch in reversed(word):
        new: dict[int, int] = {}
        for n, amp in state.items():
            if ch == "c":
                new[n + 1] = new.get(n + 1, 0) + amp
            elif n:
                new[n - 1] = new.get(n - 1, 0) + n * amp
        state = new
    return state.get(0, 0)


def test_vev_of_aa_dagger():
    spec = boson_pair()
    assert vacuum_expectation(ann("a") * cre("a"), spec) == UnitScalar.one()


def test_vev_of_number_operator():
    spec = boson_pair()
    assert vacuum_expectation(cre("a") * ann("a"), spec).is_zero


def test_vev_of_cubed_word_matches_enumeration_oracle():
    assert _vev_single_mode_oracle("aaaccc") == 6
    spec = boson_pair()
    assert vacuum_expectation(ann("a") ** 3 * cre("a") ** 3, spec) == UnitScalar.coerce(6)


def test_vev_random_single_mode_words_match_oracle():
    rng = random.Random(43)
    spec = AlgebraSpec([("a", BOSON)])
    for _ in range(40):
        word = "".join(rng.choice("ac") for _ in range(rng.randint(1, 6)))
        e = OpExpr.one()
        for ch in word:
            e = e * (ann("a") if ch == "a" else cre("a"))
        assert vacuum_expectation(e, spec) == UnitScalar.coerce(_vev_single_mode_oracle(word))


def test_vev_ignores_pure_phase_factors():
    spec = boson_pair()
    assert vacuum_expectation(phase({"a": 2, "b": -1}), spec) == UnitScalar.one()


# --- phases and specialization ------------------------------------------------


def test_phase_product_adds_exponents():
    spec = boson_pair()
    lhs = normal_order(phase({"a": 1, "b": 2}) * phase({"a": -1, "b": 1}), spec)
    assert lhs == normal_order(phase({"b": 3}), spec)


def test_phase_exponents_reduce_mod_order_at_parity():
    spec = boson_pair(q=-1)
    assert normal_order(phase({"a": 2}), spec) == OpExpr.one()
    assert normal_order(phase({"a": -1}), spec) == normal_order(phase({"a": 1}), spec)


def test_scalar_specialization_at_parity():
    spec = boson_pair(q=-1)
    assert normal_order((qpow(1) + 1) * ann("a"), spec).is_zero_expr


def test_formal_phases_do_not_reduce():
    spec = boson_pair()
    assert normal_order(phase({"a": 2}), spec) != OpExpr.one()


# --- misc --------------------------------------------------------------------


def test_as_scalar():
    assert as_scalar(OpExpr.scalar(qpow(2))) == qpow(2)
    assert as_scalar(OpExpr.zero()) == UnitScalar.zero()
    assert as_scalar(ann("a")) is None


def test_render_golden():
    spec = abnormal_pair()
    e = normal_order(-(phase({"a": 1, "b": 1}) * cre("b")), spec)
    assert render(e, spec) == "ad[b]*phase[1,1]"
    assert render(OpExpr.zero(), spec) == "0"
    assert render(-(cre("b") * phase({"a": 1, "b": 1})), spec) == "(-1)*ad[b]*phase[1,1]"
    assert render(cre("a") ** 2 * ann("a"), spec) == "ad[a]^2*a[a]"


def test_exchange_matrix_validation():
    with pytest.raises(ValueError):
        ExchangeMatrix(("a", "b"), {("a", "b"): qpow(1) + 1})
    with pytest.raises(UnknownModeError):
        ExchangeMatrix(("a", "b"), {("a", "z"): -1})
    m = ExchangeMatrix(("a", "b"), {("b", "a"): qpow(1)})
    assert m.get("a", "b") == qpow(-1)


def test_spec_rejects_nonunit_q():
    with pytest.raises(ValueError):
        AlgebraSpec([("a", BOSON)], q=2)


def test_spec_pythagorean_unit_q_has_no_finite_order():
    spec = AlgebraSpec([("a", BOSON)], q=GaussianRational(Fraction(3, 5), Fraction(4, 5)))
    assert spec.q_order is None
    assert normal_order(phase({"a": 2}), spec) != OpExpr.one()
