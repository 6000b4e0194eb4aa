import numpy as np
import pytest
from hypothesis import strategies as st

from bohrlab.laurent import LaurentPoly


def small_laurent(dim=1, max_terms=4, max_exp=4, max_coeff=6, allow_zero=True):
    """Hypothesis strategy for small Laurent polynomials."""
    exp = st.tuples(*[st.integers(-max_exp, max_exp)] * dim)
    coeff = st.integers(-max_coeff, max_coeff)
    terms = st.dictionaries(exp, coeff, min_size=0 if allow_zero else 1,
                            max_size=max_terms)
    strat = terms.map(lambda t: LaurentPoly(dim, t))
    if not allow_zero:
        strat = strat.filter(lambda p: not p.is_zero())
    return strat


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.Philox(key=20240831))


def random_poly(rng, dim=1, max_terms=4, max_exp=4, max_coeff=6, nonzero=True):
    while True:
        n = int(rng.integers(1, max_terms + 1))
        terms = {}
        for _ in range(n):
            e = tuple(int(rng.integers(-max_exp, max_exp + 1)) for _ in range(dim))
            c = int(rng.integers(-max_coeff, max_coeff + 1))
            terms[e] = terms.get(e, 0) + c
        p = LaurentPoly(dim, terms)
        if not nonzero or not p.is_zero():
            return p
