import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def simplex_p(draw, d_min=1, d_max=4, floor=0.02):
    """Positive probability vectors of length d+1, entries at least ``floor``."""
    d = draw(st.integers(d_min, d_max))
    raw = draw(st.lists(st.floats(floor, 1.0), min_size=d + 1, max_size=d + 1))
    p = np.array(raw) / sum(raw)
    p[0] = 1.0 - p[1:].sum()
    return p


@st.composite
def distinct_alpha(draw, d, step=0.05, bound=3.0):
    """alpha_0 = 0 followed by d nonzero values on a grid of spacing ``step``."""
    m = int(round(bound / step))
    ks = draw(st.lists(st.integers(-m, m).filter(bool), min_size=d, max_size=d, unique=True))
    return np.array([0.0] + [k * step for k in ks])


def dirichlet_p(rng, d):
    p = rng.dirichlet(np.ones(d + 1))
    p[0] = 1.0 - p[1:].sum()
    return p


def random_alpha(rng, d, gap=0.05, bound=3.0):
    while True:
        a = np.concatenate([[0.0], rng.uniform(-bound, bound, d)])
        diffs = np.abs(a[:, None] - a[None, :]) + np.eye(d + 1)
        if diffs.min() >= gap:
            return a


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rational_kappa(p, rng, spread=5):
    """A kappa point with exact rational entries for rational ``p``.

    Columns are Gram-Schmidt orthogonalised in exact arithmetic against the
    p-weighted inner product and rescaled to leading entry one.  Returns the
    Fraction matrices (U, p_tilde) and the float KrawtchoukParam.
    """
    from fractions import Fraction

    from kdgaudin.kappa import KrawtchoukParam

    p = [Fraction(v) for v in p]
    d1 = len(p)

    def ip(a, b):
        return sum(pk * ak * bk for pk, ak, bk in zip(p, a, b))

    cols = [[Fraction(1)] * d1]
    while len(cols) < d1:
        v = [Fraction(int(t)) for t in rng.integers(-spread, spread + 1, d1)]
        for w in cols:
            c = ip(v, w) / ip(w, w)
            v = [a - c * b for a, b in zip(v, w)]
        if v[0] == 0 or ip(v, v) == 0:
            continue
        cols.append([a / v[0] for a in v])
    U = [[cols[k][i] for k in range(d1)] for i in range(d1)]
    p_tilde = [p[0] / ip(cols[k], cols[k]) for k in range(d1)]
    kappa = KrawtchoukParam(1 / float(p[0]), [float(v) for v in p],
                            [float(v) for v in p_tilde], [[float(v) for v in row] for row in U])
    return U, p_tilde, kappa
