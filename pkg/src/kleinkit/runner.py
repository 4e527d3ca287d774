"""Execute parsed assertion scripts and build run reports.

Every assertion is checked symbolically (exact normal form); numeric checking
against the truncated Fock backend is added when a dimension is configured by
a ``numeric dim`` directive or the ``--numeric-dim`` CLI flag.  Probe angles
are multiples of pi: explicit ``theta`` lists win, otherwise a specialized-q
script probes the angle of its q value and a formal-q script probes the
standard set pi, pi/3, 2pi/7.

Exit-code contract: 0 all assertions pass, 1 at least one fails, 2 parse or
semantic error (raised as :class:`ScriptError` / ``dsl.ParseError`` and turned
into an error report by the CLI).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import dsl
from .algebra import (
    AlgebraSpec,
    ExchangeMatrix,
    MissingGeneratorError,
    OpExpr,
    UnknownModeError,
    adjoint,
    ann,
    as_scalar,
    cre,
    normal_order,
    phase,
    render,
)
from .fock import FockSpace, check_zero, evaluate
from .klein import ArityError, UnknownMapError, apply_dressing, standard_map, verify_klein
from .qscalar import UnitScalar

DEFAULT_PROBES: tuple[Fraction, ...] = (Fraction(1), Fraction(1, 3), Fraction(2, 7))
DEFAULT_TOL = 1e-10

REPORT_SCHEMA = {
    "type": "object",
    "required": ["script", "assertions", "summary", "exit_code"],
    "properties": {
        "script": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "assertions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["line", "kind", "symbolic_pass", "numeric", "pass"],
                "properties": {
                    "line": {"type": "integer"},
                    "kind": {"type": "string"},
                    "symbolic_pass": {"type": "boolean"},
                    "witness": {"type": ["string", "null"]},
                    "numeric": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["theta", "interior_residual", "full_residual"],
                            "properties": {
                                "theta": {"type": "number"},
                                "interior_residual": {"type": "number"},
                                "full_residual": {"type": "number"},
                            },
                        },
                    },
                    "pass": {"type": "boolean"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["passed", "failed"],
            "properties": {"passed": {"type": "integer"}, "failed": {"type": "integer"}},
        },
        "exit_code": {"type": "integer"},
    },
}


class ScriptError(Exception):
    """Semantic failure (undefined name, bad arity, ...) with a source line."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.column = 1
        self.message = message
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class RunOptions:
    numeric_dim: int | None = None
    thetas: tuple[Fraction, ...] | None = None
    tol: float | None = None
    seed: int | None = None


@dataclass(frozen=True)
class NumericResult:
    theta: float
    interior_residual: float
    full_residual: float


@dataclass(frozen=True)
class AssertionResult:
    line: int
    kind: str
    symbolic_pass: bool
    witness: str | None
    numeric: tuple[NumericResult, ...]
    passed: bool

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [f"line {self.line:>4}  {self.kind:<12} {status}"]
        if not self.symbolic_pass and self.witness:
            parts.append(f"witness: {self.witness}")
        for n in self.numeric:
            parts.append(
                f"theta={n.theta:.6g}: interior {n.interior_residual:.3e}, full {n.full_residual:.3e}"
            )
        return "  |  ".join(parts)


@dataclass(frozen=True)
class RunReport:
    script: str
    seed: int | None
    assertions: tuple[AssertionResult, ...]

    @property
    def passed(self) -> int:
        return sum(1 for a in self.assertions if a.passed)

    @property
    def failed(self) -> int:
        return sum(1 for a in self.assertions if not a.passed)

    @property
    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1

    def to_dict(self) -> dict:
        return {
            "script": self.script,
            "seed": self.seed,
            "assertions": [
                {
                    "line": a.line,
                    "kind": a.kind,
                    "symbolic_pass": a.symbolic_pass,
                    "witness": a.witness,
                    "numeric": [
                        {
                            "theta": n.theta,
                            "interior_residual": n.interior_residual,
                            "full_residual": n.full_residual,
                        }
                        for n in a.numeric
                    ],
                    "pass": a.passed,
                }
                for a in self.assertions
            ],
            "summary": {"passed": self.passed, "failed": self.failed},
            "exit_code": self.exit_code,
        }

    def render_text(self) -> str:
        lines = [f"script: {self.script}"]
        lines.extend(a.describe() for a in self.assertions)
        lines.append(f"summary: {self.passed} passed, {self.failed} failed")
        return "\n".join(lines)


class _Evaluator:
    def __init__(self, spec: AlgebraSpec, env: Mapping[str, OpExpr], line: int):
        self.spec = spec
        self.env = env
        self.line = line

    def fail(self, message: str) -> ScriptError:
        return ScriptError(self.line, message)

    def expr(self, node) -> OpExpr:
        if isinstance(node, dsl.Num):
            return OpExpr.scalar(node.value)
        if isinstance(node, dsl.QPow):
            return OpExpr.scalar(UnitScalar.q_power(node.exponent))
        if isinstance(node, dsl.Ann):
            self._mode(node.mode)
            return ann(node.mode)
        if isinstance(node, dsl.Cre):
            self._mode(node.mode)
            return cre(node.mode)
        if isinstance(node, dsl.Adj):
            return adjoint(self.expr(node.arg), self.spec)
        if isinstance(node, dsl.Phase):
            for name, _ in node.items:
                self._mode(name)
            return phase(node.items)
        if isinstance(node, dsl.Comm):
            left, right = self.expr(node.left), self.expr(node.right)
            return left * right - right * left
        if isinstance(node, dsl.AComm):
            left, right = self.expr(node.left), self.expr(node.right)
            return left * right + right * left
        if isinstance(node, dsl.QComm):
            left, right = self.expr(node.left), self.expr(node.right)
            factor = self.scalar(node.factor, "qcomm factor")
            return left * right - factor * (right * left)
        if isinstance(node, dsl.MapApply):
            dressing = self._map(node.name)
            return apply_dressing(dressing, self.expr(node.arg), self.spec)
        if isinstance(node, dsl.Ref):
            try:
                return self.env[node.name]
            except KeyError:
                raise self.fail(f"undefined name {node.name!r}") from None
        if isinstance(node, dsl.Add):
            return self.expr(node.left) + self.expr(node.right)
        if isinstance(node, dsl.Sub):
            return self.expr(node.left) - self.expr(node.right)
        if isinstance(node, dsl.Mul):
            return self.expr(node.left) * self.expr(node.right)
        if isinstance(node, dsl.Neg):
            return -self.expr(node.arg)
        if isinstance(node, dsl.Pow):
            base = self.expr(node.base)
            if node.exponent >= 0:
                return base**node.exponent
            s = as_scalar(base)
            if s is None or s.as_monomial() is None:
                raise self.fail("negative powers are only defined for scalar monomials")
            return OpExpr.scalar(s**node.exponent)
        raise self.fail(f"cannot evaluate expression node {node!r}")

    def scalar(self, node, what: str) -> UnitScalar:
        value = as_scalar(self.expr(node))
        if value is None:
            raise self.fail(f"{what} must be a scalar expression")
        return value

    def _mode(self, name: str) -> None:
        if name not in self.spec.index:
            raise self.fail(f"mode {name!r} is not declared")

    def _map(self, dsl_name: str):
        catalog_name = dsl_name.replace("_", "-")
        try:
            return standard_map(catalog_name, self.spec)
        except (UnknownMapError, ArityError) as exc:
            raise self.fail(str(exc)) from None


def _resolve_thetas(
    spec: AlgebraSpec, thetas: tuple[Fraction, ...] | None, line: int
) -> tuple[float, ...]:
    if thetas is not None:
        values = tuple(float(t) * math.pi for t in thetas)
        if spec.q_value is not None:
            target = complex(spec.q_value)
            for v in values:
                if abs(np.exp(1j * v) - target) > 1e-9:
                    raise ScriptError(
                        line, f"theta {v:.6g} is incompatible with specialized q = {spec.q_value}"
                    )
        return values
    if spec.q_value is not None:
        return (spec.theta,)
    return tuple(float(t) * math.pi for t in DEFAULT_PROBES)


def run(program: dsl.Program, options: RunOptions | None = None, script_name: str = "<script>") -> RunReport:
    """Execute a program; returns the report, raising :class:`ScriptError` on semantic errors."""
    options = options or RunOptions()
    mode_decls: list[tuple[str, str]] = []
    exchange_decls: list[dsl.ExchangeStmt] = []
    q_value = None
    numeric_dim: int | None = None
    numeric_thetas: tuple[Fraction, ...] | None = None
    numeric_tol: float | None = None
    spec: AlgebraSpec | None = None
    env: dict[str, OpExpr] = {}
    results: list[AssertionResult] = []

    def freeze_spec(line: int) -> AlgebraSpec:
        nonlocal spec
        if spec is not None:
            return spec
        if not mode_decls:
            raise ScriptError(line, "no modes declared")
        entries = {}
        for decl in exchange_decls:
            evaluator = _Evaluator(AlgebraSpec(mode_decls), {}, decl.line)
            value = evaluator.scalar(decl.value, "exchange entry")
            key = (decl.first, decl.second)
            if key in entries or (decl.second, decl.first) in entries:
                raise ScriptError(decl.line, f"duplicate exchange entry for pair {key}")
            entries[key] = value
        try:
            spec = AlgebraSpec(mode_decls, entries, q_value)
        except ValueError as exc:
            raise ScriptError(line, str(exc)) from None
        return spec

    def numeric_results(raw: OpExpr, line: int) -> tuple[NumericResult, ...]:
        dim = options.numeric_dim if options.numeric_dim is not None else numeric_dim
        if dim is None:
            return ()
        thetas = options.thetas if options.thetas is not None else numeric_thetas
        tol = options.tol if options.tol is not None else (numeric_tol or DEFAULT_TOL)
        current = freeze_spec(line)
        try:
            space = FockSpace.from_algebra(current, dim)
        except ValueError as exc:
            raise ScriptError(line, str(exc)) from None
        out = []
        for theta in _resolve_thetas(current, thetas, line):
            report = check_zero(evaluate(raw, current, space, theta), tol)
            out.append(
                NumericResult(
                    theta=theta,
                    interior_residual=report.interior_residual,
                    full_residual=report.full_residual,
                )
            )
        return tuple(out)

    def numeric_ok(numeric: tuple[NumericResult, ...], line: int) -> bool:
        tol = options.tol if options.tol is not None else (numeric_tol or DEFAULT_TOL)
        return all(n.interior_residual <= tol for n in numeric)

    for stmt in program.statements:
        if isinstance(stmt, dsl.ModeStmt):
            if spec is not None:
                raise ScriptError(stmt.line, "mode declarations must precede definitions")
            mode_decls.append((stmt.name, stmt.statistics))
        elif isinstance(stmt, dsl.ExchangeStmt):
            if spec is not None:
                raise ScriptError(stmt.line, "exchange declarations must precede definitions")
            exchange_decls.append(stmt)
        elif isinstance(stmt, dsl.QStmt):
            if spec is not None:
                raise ScriptError(stmt.line, "the q setting must precede definitions")
            if not stmt.formal:
                evaluator = _Evaluator(AlgebraSpec(mode_decls or [("_", "boson")]), {}, stmt.line)
                value = evaluator.scalar(stmt.value, "q setting")
                mono = value.as_monomial()
                if mono is None or mono[1] != 0:
                    raise ScriptError(stmt.line, "q must be set to an exact constant")
                q_value = mono[0]
        elif isinstance(stmt, dsl.NumericStmt):
            if stmt.dim is not None:
                numeric_dim = stmt.dim
            if stmt.thetas is not None:
                numeric_thetas = stmt.thetas
            if stmt.tol is not None:
                numeric_tol = stmt.tol
        elif isinstance(stmt, dsl.LetStmt):
            current = freeze_spec(stmt.line)
            if stmt.name in env:
                raise ScriptError(stmt.line, f"duplicate definition of {stmt.name!r}")
            evaluator = _Evaluator(current, env, stmt.line)
            try:
                env[stmt.name] = evaluator.expr(stmt.value)
            except (UnknownModeError, MissingGeneratorError, ValueError) as exc:
                if isinstance(exc, ScriptError):
                    raise
                raise ScriptError(stmt.line, str(exc)) from None
        elif isinstance(stmt, (dsl.AssertZero, dsl.AssertEqual)):
            current = freeze_spec(stmt.line)
            evaluator = _Evaluator(current, env, stmt.line)
            try:
                if isinstance(stmt, dsl.AssertZero):
                    kind = "assert_zero"
                    raw = evaluator.expr(stmt.expr)
                else:
                    kind = "assert_equal"
                    raw = evaluator.expr(stmt.left) - evaluator.expr(stmt.right)
            except (UnknownModeError, MissingGeneratorError, ValueError) as exc:
                if isinstance(exc, ScriptError):
                    raise
                raise ScriptError(stmt.line, str(exc)) from None
            nf = normal_order(raw, current)
            symbolic_pass = not nf.terms
            witness = None if symbolic_pass else render(nf, current)
            numeric = numeric_results(raw, stmt.line)
            passed = symbolic_pass and numeric_ok(numeric, stmt.line)
            results.append(AssertionResult(stmt.line, kind, symbolic_pass, witness, numeric, passed))
        elif isinstance(stmt, dsl.VerifyMap):
            current = freeze_spec(stmt.line)
            evaluator = _Evaluator(current, env, stmt.line)
            dressing = evaluator._map(stmt.name)
            expected = None
            if stmt.expect_all is not None:
                expected = ExchangeMatrix.uniform(
                    current.names, evaluator.scalar(stmt.expect_all, "expected exchange")
                )
            elif stmt.expect_pairs is not None:
                entries = {
                    (a, b): evaluator.scalar(v, "expected exchange") for a, b, v in stmt.expect_pairs
                }
                expected = ExchangeMatrix(current.names, entries)
            report = verify_klein(dressing, current, expected)
            witness = None
            if not report.all_pass:
                witness = "; ".join(e.describe() for e in report.failures())
            numeric: list[NumericResult] = []
            dim = options.numeric_dim if options.numeric_dim is not None else numeric_dim
            if dim is not None:
                per_theta: dict[float, NumericResult] = {}
                for entry in report.entries:
                    for n in numeric_results(entry.residual, stmt.line):
                        prev = per_theta.get(n.theta)
                        if prev is None or n.interior_residual > prev.interior_residual:
                            per_theta[n.theta] = n
                numeric = [per_theta[t] for t in sorted(per_theta)]
            passed = report.all_pass and numeric_ok(tuple(numeric), stmt.line)
            results.append(
                AssertionResult(stmt.line, "verify_map", report.all_pass, witness, tuple(numeric), passed)
            )
        else:
            raise ScriptError(getattr(stmt, "line", 0), f"unsupported statement {stmt!r}")

    return RunReport(script=script_name, seed=options.seed, assertions=tuple(results))
