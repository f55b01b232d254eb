import numpy as np
import pytest

import geomcd as g


@pytest.fixture(scope="session")
def baseline():
    """Baseline scenario: 64x64, 60 frames, square moving and rotating in [20, 40]."""
    cfg = g.preset("baseline")
    frames, truth = g.generate(cfg)
    return cfg, frames, truth


@pytest.fixture(scope="session")
def static_stream():
    cfg = g.ScenarioConfig(seed=7, objects=(), noise_sigma=0.01)
    frames, truth = g.generate(cfg)
    return frames


def random_normal_operator(rng, n, rank):
    """Real normal matrix with `rank` well-separated nonzero eigenvalues.

    Block-diagonal real canonical form conjugated by a random orthogonal
    matrix, so eigenvalues are known exactly and conditioning is perfect.
    """
    mags = np.linspace(0.6, 1.1, rank)
    D = np.zeros((n, n))
    eigs = []
    i = 0
    while i < rank:
        if rank - i >= 2 and rng.random() < 0.5:
            theta = rng.uniform(0.2, 2.5)
            m = mags[i]
            c, s = m * np.cos(theta), m * np.sin(theta)
            D[i : i + 2, i : i + 2] = [[c, -s], [s, c]]
            eigs += [complex(c, s), complex(c, -s)]
            i += 2
        else:
            D[i, i] = mags[i]
            eigs.append(complex(mags[i]))
            i += 1
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q @ D @ Q.T, np.array(eigs)


def downscale_mask(mask, factor=4):
    """Box-average a boolean mask and re-threshold at 50% coverage."""
    h, w = mask.shape
    return mask.astype(float).reshape(h // factor, factor, w // factor, factor).mean(
        axis=(1, 3)
    ) >= 0.5


def mask_iou(a, b):
    union = (a | b).sum()
    return 1.0 if union == 0 else (a & b).sum() / union
