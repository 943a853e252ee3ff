"""Shared pytest fixtures."""

import os
import random
import sys

import pytest

# Add repository root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))


@pytest.fixture
def rng():
    """Deterministic generator for sampled property checks."""
    return random.Random(20240917)


@pytest.fixture(params=[2, 3])
def small_prime(request):
    return request.param
