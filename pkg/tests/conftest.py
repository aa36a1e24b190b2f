# -*- coding: utf-8 -*-
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lattice import LatticeSpec  # noqa: E402


@pytest.fixture
def ring6():
    return LatticeSpec(1, 6)


@pytest.fixture
def triangle():
    return LatticeSpec(1, 3)
