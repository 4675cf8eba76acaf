import numpy as np

from grassconv.grassmann import JordanAngles

SIZES = [(1, 1), (2, 1), (1, 3), (2, 2), (3, 2), (2, 3), (4, 3), (3, 5), (4, 4)]


def random_angles(rng, n, m, scale=0.6):
    return JordanAngles.from_lambda(scale * rng.uniform(0, 1, min(n, m)), n, m)
