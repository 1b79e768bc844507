import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import pytest

from greenhyp.toydiagrams import (chain_diagram, contractible_complex,
                                  contractible_diagram, rand_complex,
                                  rand_graded_map, rand_mapping_cochain,
                                  rand_matrix, square_diagram)

__all__ = [
    "chain_diagram", "contractible_complex", "contractible_diagram",
    "rand_complex", "rand_graded_map", "rand_mapping_cochain", "rand_matrix",
    "square_diagram",
]


@pytest.fixture
def rng():
    return random.Random(20240817)
