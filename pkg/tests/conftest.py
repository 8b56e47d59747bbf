import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bmplane.ellipse import EllipseParams
from bmplane.gauge import circle_gauge, ellipse_gauge, lp_gauge, polygon_gauge, sample_gauge
from bmplane.solver import solve_uniform

import bodies


def _corpus() -> dict:
    rng = np.random.default_rng(20240817)
    nodes = np.arange(128) * math.pi / 128
    return {
        "circle": circle_gauge(),
        "square": lp_gauge(math.inf),
        "square-polygon": polygon_gauge(bodies.square_vertices()),
        "diamond": polygon_gauge(bodies.diamond_vertices()),
        "l1": lp_gauge(1.0),
        "hexagon": polygon_gauge(bodies.hexagon_inradius_1()),
        "ellipse": ellipse_gauge(EllipseParams(1.0, 0.2, 0.1)),
        "samples": sample_gauge(1.0 + 0.12 * np.cos(2 * nodes) + 0.05 * np.sin(4 * nodes)),
        "star": polygon_gauge(bodies.random_star_polygon(rng)),
        "convex": polygon_gauge(bodies.random_convex_polygon(rng)),
    }


@pytest.fixture(scope="session")
def corpus() -> dict:
    return _corpus()


@pytest.fixture(scope="session")
def solved_corpus(corpus) -> dict:
    """name -> (gauge, UniformSolution) with default options, solved once."""
    return {name: (g, solve_uniform(g)) for name, g in corpus.items()}
