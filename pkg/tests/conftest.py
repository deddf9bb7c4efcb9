import numpy as np
import pytest

from theta_multiplier import symplectic as sp

CONFIGS = [(g, parity) for g in (1, 2, 3) for parity in ("even", "odd")]

# swaps the two hyperbolic planes of the g=2 even form; its reduction is not a
# product of transvections, so it represents the other coset of O+(4, 2)
PLANE_SWAP = np.array(
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.int64
)


def sample_member(form, rng, word_length=8):
    """Random theta-group element; at g=2 even both transvection cosets occur."""
    gamma = sp.random_element(form, word_length, rng.integers(1 << 62))
    if form.g == 2 and form.parity == "even" and rng.integers(2):
        gamma = gamma @ sp.ThetaGroupElement(form, PLANE_SWAP)
    return gamma


@pytest.fixture
def rng():
    return np.random.default_rng(20260416)


# one line per acceptance criterion, printed after the test session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
