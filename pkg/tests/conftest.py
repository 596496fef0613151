"""Shared fixtures: the worked four-pair instance and its compiled form."""

from __future__ import annotations

import pytest

from hearthproof.compiler import CompileResult, PartitionInstance, compile_instance

WORKED_PAIRS = ((1, 2), (4, 3), (5, 6), (8, 8))
WORKED_TARGET = 18
WORKED_VECTOR = ("x", "y", "y", "x")


@pytest.fixture(scope="session")
def worked_instance() -> PartitionInstance:
    return PartitionInstance(WORKED_PAIRS, WORKED_TARGET)


@pytest.fixture(scope="session")
def worked_compiled(worked_instance) -> CompileResult:
    return compile_instance(worked_instance, validate="none")
