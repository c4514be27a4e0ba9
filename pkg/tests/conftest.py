# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import pytest

from pident.common import Settings
from pident.ioequations import IOEquations, io_equations
from pident.model import ODEModel
from tests._common import read_test_model


@pytest.fixture
def two_compartment() -> ODEModel:
    return read_test_model("two_compartment")


@pytest.fixture
def slow_fast() -> ODEModel:
    return read_test_model("slow_fast")


@pytest.fixture
def constant_state() -> ODEModel:
    return read_test_model("constant_state")


@pytest.fixture
def two_parameter_offset() -> ODEModel:
    return read_test_model("two_parameter_offset")


@pytest.fixture
def degenerate_wronskian() -> ODEModel:
    return read_test_model("degenerate_wronskian")


@pytest.fixture
def forced_decay() -> ODEModel:
    return read_test_model("forced_decay")


@pytest.fixture
def two_compartment_equations(two_compartment) -> IOEquations:
    return io_equations(two_compartment, settings=Settings())
