import numpy as np
import pytest

from optomech.params import Drive, ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_drive(rng, kind: str) -> Drive:
    """A random drive of the given structural kind."""
    if kind == "zero":
        return Drive.constant(0.0)
    if kind == "constant":
        return Drive.constant(float(rng.uniform(-1.0, 1.5)))
    if kind == "offset":
        return Drive.offset_sinusoid(float(rng.uniform(0.1, 1.5)),
                                     float(rng.uniform(-1.0, 1.0)),
                                     float(rng.uniform(0.1, 2.5)))
    if kind == "cosine":
        return Drive.cosine(float(rng.uniform(-1.0, 1.5)),
                            float(rng.uniform(0.1, 2.5)))
    raise ValueError(kind)


def random_spec(rng, squeezing: bool = True) -> ModelSpec:
    coupling = random_drive(rng, rng.choice(["zero", "constant", "offset"]))
    displacement = random_drive(rng, rng.choice(["zero", "constant", "cosine"]))
    if squeezing:
        kind = rng.choice(["zero", "constant", "cosine"])
        if kind == "constant":
            sq = Drive.constant(float(rng.uniform(-0.2, 0.6)))
        elif kind == "cosine":
            sq = Drive.cosine(float(rng.uniform(-0.15, 0.15)),
                              float(rng.uniform(0.5, 2.5)))
        else:
            sq = Drive.constant(0.0)
    else:
        sq = Drive.constant(0.0)
    return ModelSpec(coupling=coupling, displacement=displacement, squeezing=sq)
