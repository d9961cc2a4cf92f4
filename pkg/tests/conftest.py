import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from rifourier.funcore import Envelope, EvalFn, StepFn

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_step(rng, max_pieces=20, vanish=True, grid=None):
    """Seeded random nonnegative StepFn with up to ``max_pieces`` pieces."""
    k = int(rng.integers(1, max_pieces + 1))
    if grid is None:
        b = np.cumsum(rng.uniform(0.05, 3.0, k))
    else:
        b = np.sort(rng.choice(grid, size=k, replace=False))
    v = rng.choice([0.0, 0.5, 1.0, 2.0, 3.0], size=k + 1) if rng.random() < 0.3 else \
        rng.uniform(0.0, 5.0, k + 1)
    if vanish:
        v[-1] = 0.0
    return StepFn(b, v)


def step_eval(f: StepFn) -> EvalFn:
    """A StepFn seen as an EvalFn with its exact envelopes."""
    b = f.breakpoints
    last = float(b[-1]) if b.size else 0.0
    return EvalFn(f, "none", Envelope(0.0, 1.0, last), Envelope(f.sup, 0.0, math.inf),
                  tuple(b.tolist()))


@st.composite
def step_functions(draw, max_pieces=12):
    k = draw(st.integers(1, max_pieces))
    gaps = draw(st.lists(st.floats(0.01, 10.0), min_size=k, max_size=k))
    vals = draw(st.lists(st.floats(0.0, 100.0), min_size=k, max_size=k))
    return StepFn(np.cumsum(gaps), vals + [0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
