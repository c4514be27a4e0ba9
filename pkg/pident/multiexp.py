# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Multi-experiment identifiability: the field generated by the coefficients of
the input-output equations and the number of experiments that suffices to
identify it.
"""
from dataclasses import dataclass
from typing import Optional

from pident.common import SelfCheckError, Settings, log
from pident.fields import FieldDesc
from pident.ioequations import IOEquations, decompose
from pident.model import JetPoint
from pident.wronskian import wronskian_ranks


@dataclass(frozen=True)
class MultiExpReport:
    """
    Multi-experiment identifiable field, the pairs ``(s, r)`` per equation
    and the experiment bound ``max(s - r + 1)``.
    """

    field: FieldDesc
    per_equation: tuple[tuple[int, int], ...]

    @property
    def bound(self) -> int:
        return max((s - r + 1 for s, r in self.per_equation), default=1)


def multiexp_field(equations: IOEquations) -> FieldDesc:
    """Field over the parameters generated by all nonconstant coefficients of the monic equations."""
    coefficients = [coefficient for terms in decompose(equations) for coefficient in terms.coefficients]
    return FieldDesc(equations.model.params, tuple(coefficients))


def experiment_bound(
    equations: IOEquations, settings: Settings = Settings(), jet_point: Optional[JetPoint] = None
) -> MultiExpReport:
    per_equation = tuple(wronskian_ranks(equations, settings, jet_point))
    for s, r in per_equation:
        if r > s:
            raise SelfCheckError(f"Wronskian rank {r} exceeds the number of monomials {s}")
    result = MultiExpReport(multiexp_field(equations), per_equation)
    log.info(
        'model "%s" has multi-experiment field %s from %d experiments', equations.model.name, result.field, result.bound
    )
    return result
