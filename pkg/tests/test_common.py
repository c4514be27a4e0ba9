# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import time

import pytest

from pident.common import (
    BUDGET_ENVVAR,
    DEFAULT_MAX_DEGREE,
    Budget,
    BudgetExhaustedError,
    ModelSyntaxError,
    PidentError,
    RankMethod,
    Settings,
)


def test_can_read_budget_from_environment():
    before = time.monotonic()
    budget = Budget.from_environment({BUDGET_ENVVAR: "2000"}, max_basis=17)
    assert budget.max_basis == 17
    assert budget.max_degree == DEFAULT_MAX_DEGREE
    assert before + 1.5 < budget.deadline < time.monotonic() + 2.5


def test_can_read_budget_without_environment_variable():
    assert Budget.from_environment({}).deadline is None


def test_fails_on_broken_budget_environment_variable():
    with pytest.raises(PidentError, match=BUDGET_ENVVAR):
        Budget.from_environment({BUDGET_ENVVAR: "soon"})


def test_fails_on_exceeded_deadline():
    with pytest.raises(BudgetExhaustedError, match="deadline"):
        Budget(deadline=time.monotonic() - 1).check()


def test_fails_on_exceeded_degree_and_basis_size():
    budget = Budget(max_degree=3, max_basis=2)
    budget.check_degree(3)
    budget.check_basis_size(2)
    with pytest.raises(BudgetExhaustedError, match="degree 4"):
        budget.check_degree(4)
    with pytest.raises(BudgetExhaustedError, match="size 3"):
        budget.check_basis_size(3)


def test_can_derive_settings_from_state_count():
    settings = Settings()
    assert settings.jet_cap_for(3) == 8
    assert settings.max_prolongation_for(3) == 7
    custom_settings = Settings(jet_cap=4, max_prolongation=2)
    assert custom_settings.jet_cap_for(3) == 4
    assert custom_settings.max_prolongation_for(3) == 2


def test_can_replace_budget_of_settings():
    budget = Budget(max_degree=5)
    settings = Settings(rank_method=RankMethod.PROBABILISTIC).with_budget(budget)
    assert settings.budget is budget
    assert settings.rank_method == RankMethod.PROBABILISTIC


def test_can_render_model_syntax_error():
    error = ModelSyntaxError(3, 7, "unexpected character '$'", "decay.model")
    assert str(error) == "decay.model:3:7: unexpected character '$'"
    assert (error.line, error.column) == (3, 7)
