"""Shared fixtures: knot/bundle input files and oracle constants."""

from __future__ import annotations

import os
import random

import pytest
from mpmath import mp, mpf, sqrt, workprec

from torsionlab import parse_presentation
from torsionlab.representation import (
    parse_alpha_file,
    parse_peripheral_file,
    parse_representation_file,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def read_fixture(name):
    with open(os.path.join(FIXTURES, name), "r", encoding="utf-8") as fh:
        return fh.read()


def load_case(stem, precision_bits=256, with_rep=True):
    """presentation [, lift], alpha, peripheral for a fixture stem."""
    pres = parse_presentation(read_fixture(stem + ".pres"))
    alpha = parse_alpha_file(read_fixture(stem + ".alpha"), pres)
    peri = parse_peripheral_file(read_fixture(stem + ".peri"), pres)
    if not with_rep:
        return pres, alpha, peri
    lift = parse_representation_file(read_fixture(stem + ".rep"), pres,
                                     precision_bits)
    return pres, lift, alpha, peri


@pytest.fixture(scope="session")
def trefoil():
    return parse_presentation(read_fixture("trefoil.pres"))


@pytest.fixture(scope="session")
def knot_5_2():
    return parse_presentation(read_fixture("k5_2.pres"))


@pytest.fixture(scope="session")
def fig8():
    return load_case("fig8", 256)


@pytest.fixture(scope="session")
def fig8_512():
    return load_case("fig8", 512)


@pytest.fixture(scope="session")
def fig8_bundle():
    return load_case("fig8_bundle", 256)


def lobachevsky_volume(precision_bits=256):
    """Figure-eight volume 2 Cl_2(pi/3) summed through the sine series.

    Regrouping sum_k sin(k pi/3)/k^2 by k mod 6 turns the series into four
    Hurwitz zeta values, which mpmath evaluates to full precision.
    """
    with workprec(precision_bits):
        s = (mp.zeta(2, mpf(1) / 6) + mp.zeta(2, mpf(2) / 6)
             - mp.zeta(2, mpf(4) / 6) - mp.zeta(2, mpf(5) / 6))
        return 2 * (sqrt(3) / 2) * s / 36


@pytest.fixture(scope="session")
def fig8_volume():
    return lobachevsky_volume(256)


@pytest.fixture()
def rng():
    return random.Random(20240817)
