"""Hypothesis strategies shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from miso_lab.experiments import families as fam


@st.composite
def complex_matrices(draw, min_dim=1, max_dim=6, scale=1.0):
    n = draw(st.integers(min_dim, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    return fam.random_matrix(np.random.default_rng(seed), n, scale)


@st.composite
def seeds(draw):
    return np.random.default_rng(draw(st.integers(0, 2**32 - 1)))


angles = st.fractions(min_value=0, max_value=2, max_denominator=12)
