import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from hellyarc.twosat import TwoSatFormula


def test_contradiction():
    f = TwoSatFormula()
    f.add_unit("x", True)
    f.add_unit("x", False)
    assert f.solve() is None


def test_empty_formula():
    f = TwoSatFormula()
    assert f.solve() == {}
    f.add_variable("x")
    got = f.solve()
    assert set(got) == {"x"}


def test_not_both():
    f = TwoSatFormula()
    f.add_not_both(("x", True), ("y", True))
    a = f.solve()
    assert not (a["x"] and a["y"])


def brute(f, vs):
    return any(
        f.satisfied_by(dict(zip(vs, bits)))
        for bits in itertools.product([False, True], repeat=len(vs))
    )


def test_brute_force_agreement_small():
    rng = random.Random(3)
    for _ in range(300):
        nv = rng.randint(1, 9)
        vs = list(range(nv))
        f = TwoSatFormula()
        for v in vs:
            f.add_variable(v)
        for _ in range(rng.randint(0, 14)):
            if rng.random() < 0.25:
                f.add_unit(rng.choice(vs), rng.random() < 0.5)
            else:
                f.add_not_both(
                    (rng.choice(vs), rng.random() < 0.5),
                    (rng.choice(vs), rng.random() < 0.5),
                )
        got = f.solve()
        assert (got is not None) == brute(f, vs)
        if got is not None:
            assert f.satisfied_by(got)


@st.composite
def formulas(draw):
    nv = draw(st.integers(1, 8))
    vs = list(range(nv))
    f = TwoSatFormula()
    for v in vs:
        f.add_variable(v)
    for _ in range(draw(st.integers(0, 12))):
        if draw(st.booleans()):
            f.add_unit(draw(st.sampled_from(vs)), draw(st.booleans()))
        else:
            f.add_not_both(
                (draw(st.sampled_from(vs)), draw(st.booleans())),
                (draw(st.sampled_from(vs)), draw(st.booleans())),
            )
    return f, vs


@given(formulas())
@settings(max_examples=150, deadline=None)
def test_hypothesis_agreement(fv):
    f, vs = fv
    got = f.solve()
    assert (got is not None) == brute(f, vs)


def test_deterministic():
    def build():
        f = TwoSatFormula()
        for v in "abcde":
            f.add_variable(v)
        f.add_not_both(("a", True), ("b", True))
        f.add_not_both(("b", False), ("c", True))
        f.add_unit("d", True)
        return f

    assert build().solve() == build().solve()
