"""Shared fixtures: one synthetic cover, the three payloads and a key set."""

import numpy as np
import pytest

from wavestego.payload import derive_slot_keys
from wavestego.samples import SAMPLE_TEXT, synthetic_audio, synthetic_cover, synthetic_logo
from wavestego.stego import embed, make_payloads

MASTER = 0x1234_5678_9ABC_DEF0


@pytest.fixture(scope="session")
def cover():
    return synthetic_cover()


@pytest.fixture(scope="session")
def payloads():
    return make_payloads(SAMPLE_TEXT, synthetic_logo(), synthetic_audio(), 256)


@pytest.fixture(scope="session")
def keys():
    return derive_slot_keys(MASTER)


@pytest.fixture(scope="session")
def embedded(cover, payloads, keys):
    """Default-parameter embedding (alpha 0.1, non-adaptive, g 1.2)."""
    return embed(cover, payloads, keys)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# One line per acceptance criterion, filled in by test_acceptance.py and
# printed in the terminal summary so it lands in captured test logs.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
