"""Shared fixtures: the annulus bump, its potentials, and reference bubbles.

The heavy objects (Riesz potentials of the bump) are session-scoped so the
acceptance criteria that share them do not pay for recomputation.
"""

import numpy as np
import pytest

import fraclap as fl


@pytest.fixture(scope="session")
def bump_density():
    return fl.annulus_bump_radial()


@pytest.fixture(scope="session")
def bump_potential_a1(bump_density):
    return fl.riesz_potential(bump_density, 1.0, 3)


@pytest.fixture(scope="session")
def bump_potential_a05(bump_density):
    return fl.riesz_potential(bump_density, 0.5, 3)


def make_bubble(n=3, alpha=1.0, scale=1.0, r_min=1e-3, r_max=1e4, points=1024):
    """(scale) * (1 + r^2)^(-(n-alpha)/2) with its exact tail record."""
    sigma = n - alpha
    grid = fl.default_grid(r_min, r_max, points)
    return fl.radial_from_callable(
        lambda r: scale * (1.0 + r * r) ** (-sigma / 2.0),
        grid, tail=fl.Tail(sigma, scale))


@pytest.fixture(scope="session")
def deep_bubble():
    # r_min = 1e-5 so the origin-centered near field loses only O(r_min^(2-alpha))
    return make_bubble(r_min=1e-5, points=1280)


@pytest.fixture(scope="session")
def bubble_grid_1024():
    return make_bubble(r_min=1e-3, r_max=1e3, points=1024)
