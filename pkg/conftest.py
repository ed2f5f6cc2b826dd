"""Shared pytest fixtures: fixed generic parameter points and isolated environment."""
from __future__ import annotations

from typing import Iterator

import pytest

from ellstab.models import EnvelopeParams, QContext
from ellstab.services import suite


@pytest.fixture
def ctx() -> QContext:
    return QContext(0.3)


@pytest.fixture
def params2() -> EnvelopeParams:
    return EnvelopeParams.create((0.7 + 0.4j, -0.5 - 0.9j), 0.35 + 0.6j, -1.1 + 0.8j, QContext(0.3))


@pytest.fixture
def params3() -> EnvelopeParams:
    return EnvelopeParams.create(
        (0.9 + 0.2j, -0.3 + 1.1j, -1.2 - 0.7j), 0.4 - 0.5j, -0.6 + 1.3j, QContext(0.25)
    )


@pytest.fixture
def params4() -> EnvelopeParams:
    return EnvelopeParams.create(
        (0.8 + 0.3j, 0.1 - 1.2j, -0.4 + 0.5j, -0.9 - 0.2j), 0.3 + 0.7j, -0.7 - 0.9j, QContext(0.2)
    )


@pytest.fixture
def vertex2() -> EnvelopeParams:
    return suite.preset("vertex_n2")


@pytest.fixture
def vertex3() -> EnvelopeParams:
    return suite.preset("vertex_n3")


@pytest.fixture
def probe_params() -> EnvelopeParams:
    return suite.preset("probe")


@pytest.fixture(autouse=True, scope="session")
def _double_precision() -> Iterator[None]:
    with pytest.MonkeyPatch.context() as patch:
        patch.setenv("ELLSTAB_PRECISION", "double")
        yield
