import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilbertlab.core_seq import BilateralSequence, IntegerWindow
from hilbertlab.ergodic import (
    FinitePermutationSystem,
    ObservableField,
    ergodic_complete_sum,
    ergodic_level_measure,
    ergodic_maximal,
    ergodic_truncated_hilbert,
    orbit_sequence,
    transference_check,
)
from hilbertlab.generators import random_observable, random_system
from hilbertlab.hilbert import truncated_hilbert

from oracles import brute_orbit_transform

CYC16 = FinitePermutationSystem.cyclic(16)
POINT16 = ObservableField.indicator(16, [0])


def test_rejects_non_permutation():
    with pytest.raises(ValueError):
        FinitePermutationSystem([0, 0, 1])
    with pytest.raises(ValueError):
        FinitePermutationSystem([])


def test_inverse():
    s = random_system(50, 3)
    assert np.array_equal(s.inverse[s.map], np.arange(50))
    assert np.array_equal(s.map[s.inverse], np.arange(50))


def test_measure_preservation_random_subsets():
    rng = np.random.default_rng(0)
    s = random_system(40, 9)
    for _ in range(100):
        E = rng.random(40) < rng.random()
        assert s.measure(s.preimage(E)) == s.measure(E)


def test_orbit_sequence_examples():
    a = orbit_sequence(FinitePermutationSystem.cyclic(4), ObservableField.indicator(4, [0]), 0, 4)
    assert {int(j) for j in a.indices() if a[j] != 0} == {-4, 0, 4}
    z = orbit_sequence(CYC16, ObservableField(np.zeros(16)), 3, 5)
    assert z.is_empty
    fixed = orbit_sequence(FinitePermutationSystem.identity(5), ObservableField.indicator(5, [2]), 2, 2)
    assert fixed == BilateralSequence(-2, np.ones(5))


def test_orbit_sequence_rejects_bad_point():
    with pytest.raises(ValueError):
        orbit_sequence(CYC16, POINT16, 16, 2)


def test_cyclic_truncated_closed_form():
    out = ergodic_truncated_hilbert(CYC16, POINT16, 3).values
    expected = np.zeros(16)
    for x in (1, 2, 3):
        expected[x] = -1 / x
    for x in (13, 14, 15):
        expected[x] = 1 / (16 - x)
    assert np.array_equal(out, expected)


@pytest.mark.parametrize("n", [1, 4, 17, 40])
def test_constant_and_identity_annihilate(n):
    assert not ergodic_truncated_hilbert(CYC16, ObservableField(np.full(16, 2.5)), n).values.any()
    f = random_observable(16, 1)
    assert not ergodic_truncated_hilbert(FinitePermutationSystem.identity(16), f, n).values.any()


def test_truncated_rejects_n():
    with pytest.raises(ValueError):
        ergodic_truncated_hilbert(CYC16, POINT16, 0)


def test_matches_brute_force_orbit_walk():
    s = random_system(30, 4)
    f = random_observable(30, 5)
    for n in (1, 3, 8, 31):
        out = ergodic_truncated_hilbert(s, f, n).values
        for x in range(30):
            assert out[x] == pytest.approx(brute_orbit_transform(s.map.tolist(), f.values.tolist(), x, n), abs=1e-12)


def test_maximal_examples():
    assert not ergodic_maximal(CYC16, ObservableField(np.ones(16)), 5).values.any()
    mx = ergodic_maximal(CYC16, POINT16, 7).values
    for x in range(16):
        d = min(x, 16 - x)
        assert mx[x] == (1 / d if 1 <= d <= 7 else 0.0)


def test_maximal_dominance():
    s, f = random_system(64, 2), random_observable(64, 2)
    mx = ergodic_maximal(s, f, 12).values
    for n in range(1, 13):
        assert np.all(mx >= np.abs(ergodic_truncated_hilbert(s, f, n).values))


def test_level_measure_examples():
    field = ergodic_truncated_hilbert(CYC16, POINT16, 3)
    assert ergodic_level_measure(field, 0.4) == 0.25
    assert ergodic_level_measure(ObservableField(np.zeros(8)), 0.1) == 0.0
    scaled = ObservableField(3 * field.values)
    assert ergodic_level_measure(scaled, 3 * 0.4) == ergodic_level_measure(field, 0.4)
    with pytest.raises(ValueError):
        ergodic_level_measure(field, 0.0)


def test_complete_sum_examples():
    assert ergodic_complete_sum(CYC16, ObservableField(np.ones(16)), 0.5, 9).total == 0
    rep = ergodic_complete_sum(CYC16, POINT16, 0.6, 5)
    assert rep.per_n_measures == [2 / 16] * 5
    assert rep.total == 10 / 16
    assert rep.bound_value == (1 / 16) / 0.6
    assert rep.growth == "linear"
    assert ergodic_complete_sum(CYC16, POINT16, 2.0, 20).total == 0


def test_complete_sum_csv():
    buf = io.StringIO()
    ergodic_complete_sum(CYC16, POINT16, 0.6, 2).write_csv(buf)
    assert buf.getvalue().splitlines() == ["n,measure,cumulative", "1,0.125,0.125", "2,0.125,0.25"]


def test_transference_examples():
    assert transference_check(CYC16, POINT16, 0.4, 3, range(-5, 6)).passed
    ident = FinitePermutationSystem.identity(10)
    assert transference_check(ident, random_observable(10, 0), 0.2, 3, range(-3, 4)).passed


@pytest.mark.parametrize("seed", range(8))
def test_transference_random(seed):
    s, f = random_system(64, seed), random_observable(64, 100 + seed)
    v = transference_check(s, f, 0.3, 4, range(-8, 9))
    assert v.passed and v.counterexample is None


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10**6), st.integers(1, 10), st.floats(-5, 5))
def test_mean_zero_invariance(M, seed, n, c):
    s, f = random_system(M, seed), random_observable(M, seed + 1)
    shifted = ObservableField(f.values + c)
    np.testing.assert_allclose(
        ergodic_truncated_hilbert(s, shifted, n).values, ergodic_truncated_hilbert(s, f, n).values, atol=1e-12
    )


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10**6), st.integers(1, 12))
def test_orbit_bridge(M, seed, K):
    s, f = random_system(M, seed), random_observable(M, seed + 7)
    x = seed % M
    a = orbit_sequence(s, f, x, K)
    for n in range(1, K + 1):
        disc = truncated_hilbert(a, n, IntegerWindow(0, 0))[0]
        assert abs(disc - ergodic_truncated_hilbert(s, f, n).values[x]) <= 1e-12


def test_json_roundtrip(tmp_path):
    p = tmp_path / "sys.json"
    p.write_text('{"size": 3, "map": [1, 2, 0]}')
    assert FinitePermutationSystem.load(p).map.tolist() == [1, 2, 0]
    p.write_text('{"size": 4, "map": [1, 2, 0]}')
    with pytest.raises(ValueError, match="size"):
        FinitePermutationSystem.load(p)
    q = tmp_path / "f.json"
    q.write_text('{"values": [0.5, -1]}')
    assert ObservableField.load(q).l1_norm() == 0.75
