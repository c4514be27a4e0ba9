# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import logging
import os
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional

#: Logger for all output of the pident module.
log = logging.getLogger("pident")

#: Environment variable with a wall-clock cap in milliseconds for a whole command.
BUDGET_ENVVAR = "IDENT_BUDGET_MS"

DEFAULT_MAX_DEGREE = 40
DEFAULT_MAX_BASIS = 400
DEFAULT_SEED = 0
DEFAULT_TRIALS = 3
DEFAULT_REPLICATION_STATE_LIMIT = 24


class PidentError(Exception):
    """Error representing that something went wrong during a pident operation."""

    pass


class ModelSyntaxError(PidentError):
    """Model text that does not conform to the model grammar."""

    def __init__(self, line: int, column: int, base_message: str, source: Optional[str] = None):
        self.line = line
        self.column = column
        self.base_message = base_message
        self.source = source
        location = f"{source}:" if source is not None else ""
        super().__init__(f"{location}{line}:{column}: {base_message}")


class ModelSemanticError(PidentError):
    """Model that parses but does not describe a valid ODE system."""

    pass


class ExpressionError(PidentError):
    """
    Text of a rational expression that cannot be parsed. Errors flagged as
    ``semantic`` are well formed but refer to unknown symbols or divide by zero.
    """

    def __init__(self, column: int, base_message: str, semantic: bool = False, name: Optional[str] = None):
        self.column = column
        self.base_message = base_message
        self.semantic = semantic
        self.name = name
        super().__init__(f"{column}: {base_message}")


class ConstantPolynomialError(PidentError):
    """Leader, initial or separant requested for a constant."""

    pass


class BudgetExhaustedError(PidentError):
    """A configured resource limit has been exceeded."""

    pass


class JetOverflowError(BudgetExhaustedError):
    """A derivative would exceed the jet cap."""

    pass


class ProlongationBudgetError(BudgetExhaustedError):
    """Input-output equations could not be verified up to the maximum prolongation."""

    def __init__(self, message: str, last_candidate: Optional[list[str]] = None):
        super().__init__(message)
        self.last_candidate = last_candidate or []


class SelfCheckError(PidentError):
    """A computed result failed its built-in verification."""

    pass


class RankMethod(Enum):
    """Methods to compute the rank of a matrix of rational functions."""

    SYMBOLIC = "symbolic"
    PROBABILISTIC = "prob"

    @property
    def description(self) -> str:
        """
        Human readable name, for example:

        >>> RankMethod("prob").description
        'probabilistic'
        """
        return "probabilistic" if self == RankMethod.PROBABILISTIC else self.value


@dataclass
class BudgetUsage:
    """Largest total degree of a new Gröbner basis element and largest basis size seen within a :py:class:`Budget`."""

    largest_degree: int = 0
    largest_basis: int = 0


@dataclass(frozen=True)
class Budget:
    """
    Resource caps for the exact-algebra engine. ``deadline`` is a
    :py:func:`time.monotonic` value after which :py:meth:`check` raises.
    """

    max_degree: int = DEFAULT_MAX_DEGREE
    max_basis: int = DEFAULT_MAX_BASIS
    deadline: Optional[float] = None
    usage: BudgetUsage = field(default_factory=BudgetUsage, compare=False, repr=False)

    @classmethod
    def from_environment(cls, environ: Optional[dict[str, str]] = None, **kwargs: Any) -> "Budget":
        environ = os.environ if environ is None else environ
        milliseconds_text = environ.get(BUDGET_ENVVAR)
        deadline = None
        if milliseconds_text:
            try:
                milliseconds = int(milliseconds_text)
            except ValueError:
                raise PidentError(
                    f"environment variable {BUDGET_ENVVAR} must be an integer but is: {milliseconds_text!r}"
                ) from None
            deadline = time.monotonic() + milliseconds / 1000
        return cls(deadline=deadline, **kwargs)

    def with_fresh_usage(self) -> "Budget":
        return replace(self, usage=BudgetUsage())

    def check(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExhaustedError("budget exhausted: wall-clock deadline reached")

    def check_degree(self, degree: int):
        self.usage.largest_degree = max(self.usage.largest_degree, degree)
        if degree > self.max_degree:
            raise BudgetExhaustedError(f"budget exhausted: total degree {degree} exceeds cap {self.max_degree}")

    def check_basis_size(self, size: int):
        self.usage.largest_basis = max(self.usage.largest_basis, size)
        if size > self.max_basis:
            raise BudgetExhaustedError(f"budget exhausted: basis size {size} exceeds cap {self.max_basis}")


#: Budget without deadline using the default caps.
UNLIMITED_TIME_BUDGET = Budget()


@dataclass(frozen=True)
class Settings:
    """Options shared by all pipeline steps; ``None`` means "derive from the model"."""

    budget: Budget = field(default_factory=Budget)
    jet_cap: Optional[int] = None
    max_prolongation: Optional[int] = None
    rank_method: RankMethod = RankMethod.SYMBOLIC
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    replication_state_limit: int = DEFAULT_REPLICATION_STATE_LIMIT

    def jet_cap_for(self, state_count: int) -> int:
        """
        Highest derivative order available for a model with ``state_count`` states.

        >>> Settings().jet_cap_for(2)
        6
        >>> Settings(jet_cap=9).jet_cap_for(2)
        9
        """
        return self.jet_cap if self.jet_cap is not None else 2 * state_count + 2

    def max_prolongation_for(self, state_count: int) -> int:
        return self.max_prolongation if self.max_prolongation is not None else state_count + 4

    def with_budget(self, budget: Budget) -> "Settings":
        return replace(self, budget=budget)
