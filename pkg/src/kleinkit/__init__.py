"""kleinkit: exact Klein / q-parity transformations of multi-mode ladder algebras.

Symbolic engine (exact, Laurent coefficients in a unit-circle parameter q),
a catalog of parity/q-parity dressing transformations with an induced-exchange
certifier, a truncated Fock-space matrix backend acting as independent numeric
oracle, and a small assertion DSL with a batch CLI (``kleinkit check``).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .qscalar import GaussianRational, UnitScalar, qpow
from .algebra import (
    BOSON,
    FERMION,
    AlgebraSpec,
    ExchangeMatrix,
    Mode,
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
from .klein import (
    CheckEntry,
    DressingMap,
    ExchangeReport,
    apply_dressing,
    induced_exchange,
    list_standard_maps,
    standard_map,
    verify_klein,
)
from .fock import (
    CheckReport,
    FockSpace,
    MatrixOperator,
    NormResult,
    check_zero,
    evaluate,
    ladder_matrix,
    phase_matrix,
    state_norm2,
)

__version__ = "0.1.0"


def bundled_script_dir() -> Path:
    """Directory holding the bundled ``.kq`` assertion scripts."""
    return Path(str(resources.files("kleinkit").joinpath("scripts")))
