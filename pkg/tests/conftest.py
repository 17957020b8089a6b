import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


def checkerboard_instance(n=16, block=(6, 10)):
    """n x n 0/1 checkerboard with a damaged central block."""
    yy, xx = np.indices((n, n))
    f = ((yy + xx) % 2).astype(float)[:, :, None]
    mask = np.zeros((n, n), dtype=bool)
    mask[block[0] : block[1], block[0] : block[1]] = True
    return f, mask


def bridge_instance():
    """1x5 strip, endpoints known (0 and 1), the middle three damaged."""
    f = np.array([[[0.0], [0.0], [0.0], [0.0], [1.0]]])
    mask = np.array([[False, True, True, True, False]])
    return f, mask


def random_instance(rng, shape=(8, 8), channels=1, damage=0.3):
    f = rng.uniform(0.0, 1.0, size=(*shape, channels))
    mask = rng.uniform(size=shape) < damage
    mask[rng.integers(shape[0]), rng.integers(shape[1])] = False
    return f, mask
