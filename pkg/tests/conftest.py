"""Shared synthetic fixtures: Gaussian PDF banks with known structure."""

import numpy as np
import pytest


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    lines = getattr(terminalreporter.config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

from tcftl.densities import (
    ConditionalPdfBank,
    ContactDensity,
    EmpiricalPdf,
    HypothesisPdfs,
)
from tcftl.measurements import CarriagePair, CarriageState, Holding, Posture

HAND = CarriageState(Posture.STANDING, Holding.HAND)
POCKET = CarriageState(Posture.STANDING, Holding.FRONT_PANTS_POCKET)
HAND_PAIR = CarriagePair(HAND, HAND)
POCKET_PAIR = CarriagePair(POCKET, POCKET)

BANK_DISTANCES = (3.0, 6.0, 12.0, 30.0)


def gaussian_pdf(mu, sigma=5.0, lo=-110, hi=-30, sample_count=1000):
    """Discretized Gaussian on the integer dB grid, renormalized to sum 1."""
    values = np.arange(lo, hi + 1)
    probs = np.exp(-0.5 * ((values - mu) / sigma) ** 2)
    return EmpiricalPdf(lo, probs / probs.sum(), sample_count=sample_count)


def path_loss_mean(distance_ft, shift=0.0):
    """Log-distance mean RSSI anchored at -50 dBm / 3 ft, exponent 2."""
    return -50.0 - 20.0 * np.log10(distance_ft / 3.0) + shift


def build_bank(shifts, distances=BANK_DISTANCES, sigma=5.0):
    """Bank whose cells are Gaussians following the log-distance model.

    Args:
        shifts: Mapping carriage pair -> constant dB offset of that pair's
            cells (models e.g. body blockage).
    """
    cells = {}
    for pair, shift in shifts.items():
        for d in distances:
            cells[(d, pair)] = gaussian_pdf(path_loss_mean(d, shift), sigma=sigma)
    return ConditionalPdfBank(cells)


@pytest.fixture
def hand_pair():
    return HAND_PAIR


@pytest.fixture
def pocket_pair():
    return POCKET_PAIR


@pytest.fixture
def two_state_bank():
    """Two carriage pairs whose cells differ by a constant 10 dB."""
    return build_bank({HAND_PAIR: 0.0, POCKET_PAIR: -10.0})


@pytest.fixture
def one_state_bank():
    return build_bank({HAND_PAIR: 0.0})


@pytest.fixture
def uniform_density():
    return ContactDensity.uniform_area()


@pytest.fixture
def two_state_hypotheses(two_state_bank, uniform_density):
    return {
        c: HypothesisPdfs.from_bank(two_state_bank, c, uniform_density)
        for c in (HAND_PAIR, POCKET_PAIR)
    }


@pytest.fixture
def one_state_hypotheses(one_state_bank, uniform_density):
    return {HAND_PAIR: HypothesisPdfs.from_bank(one_state_bank, HAND_PAIR, uniform_density)}
