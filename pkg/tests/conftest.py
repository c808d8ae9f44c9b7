import numpy as np
import pytest


def star_polygon(rng, n_vertices=7, r_min=0.2, r_max=0.45, center=(0.0, 0.0)):
    """Random simple CCW polygon, star-shaped about its center."""
    angles = np.sort(rng.uniform(0.0, 2 * np.pi, n_vertices))
    # keep consecutive angles separated so edges stay well conditioned
    while np.min(np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))) < 0.05:
        angles = np.sort(rng.uniform(0.0, 2 * np.pi, n_vertices))
    radii = rng.uniform(r_min, r_max, n_vertices)
    pts = np.column_stack([np.cos(angles), np.sin(angles)]) * radii[:, None]
    return pts + np.asarray(center)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
