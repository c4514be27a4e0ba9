"""Functions and constants commonly used by multiple tests."""
# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import logging
import os
from functools import lru_cache

from pident.model import ODEModel, read_model

TESTS_DATA_PATH = os.path.join(os.path.dirname(__file__), "data")
TESTS_OUTPUT_PATH = os.path.join(os.path.dirname(__file__), "output")

_log = logging.getLogger("pident.test")


def output_path(name):
    result = os.path.join(TESTS_OUTPUT_PATH, name)
    os.makedirs(os.path.dirname(result), exist_ok=True)
    return result


def model_path(name: str) -> str:
    return os.path.join(TESTS_DATA_PATH, f"{name}.model")


@lru_cache(maxsize=None)
def read_test_model(name: str) -> ODEModel:
    """Model from ``TESTS_DATA_PATH``, read only once per test session."""
    _log.info('reading test model "%s"', name)
    return read_model(model_path(name))
