import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jetlc import scalar_expr as S
from jetlc.forms import DiffForm
from jetlc.geometry import build_context

settings.register_profile(
    "jetlc", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("jetlc")


def coords_of(n):
    return st.sampled_from(S.coordinates(n))


small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4).map(S.Q)


def exprs(n=2, allow_quotient=False):
    """Random expression DAGs over the jet coordinates of dimension n."""
    leaves = st.one_of(small_rationals.map(S.const), coords_of(n).map(S.coord))

    def extend(children):
        ops = [
            st.lists(children, min_size=2, max_size=3).map(S.add_all),
            st.lists(children, min_size=2, max_size=3).map(S.mul_all),
            st.tuples(children, st.integers(2, 3)).map(lambda t: S.power(t[0], t[1])),
        ]
        if allow_quotient:
            # 1 + c^2 never vanishes
            ops.append(st.tuples(children, coords_of(n)).map(
                lambda t: S.quotient(t[0], S.add(S.ONE, S.power(S.coord(t[1]), 2)))))
        return st.one_of(*ops)

    return st.recursive(leaves, extend, max_leaves=8)


def forms(n=2, degree=1, terms=3):
    keys = st.lists(coords_of(n), min_size=degree, max_size=degree, unique=True)
    term = st.tuples(keys, exprs(n))

    def build(items):
        out = DiffForm.zero(degree)
        for key, c in items:
            out = out + DiffForm.basis(*key, coeff=c)
        return out

    return st.lists(term, min_size=1, max_size=terms).map(build)


@st.composite
def jet_points(draw, n=2):
    seed = draw(st.integers(0, 10**6))
    return S.random_point(n, random.Random(seed))


@st.composite
def tangent_vectors(draw, n=2, count=1):
    cs = S.coordinates(n)
    out = []
    for _ in range(count):
        picks = draw(st.lists(st.sampled_from(cs), min_size=1, max_size=3, unique=True))
        out.append({c: draw(small_rationals) for c in picks})
    return out


@pytest.fixture(scope="session")
def ctx2():
    return build_context(2)


@pytest.fixture(scope="session")
def ctx3():
    return build_context(3)


@pytest.fixture(scope="session")
def ctx4():
    return build_context(4)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
