import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from selinet.errors import ArgumentError, DimensionError
from selinet.numerics import Rng, affine, relu, sigmoid, softmax


class TestRng:
    def test_same_seed_same_sequence(self):
        a, b = Rng(123), Rng(123)
        assert [a.next_u64() for _ in range(1000)] == [b.next_u64() for _ in range(1000)]

    def test_different_seeds_differ(self):
        assert Rng(1).next_u64() != Rng(2).next_u64()

    def test_vectorized_matches_sequential(self):
        vec = Rng(42).uniforms(100)
        seq = Rng(42)
        assert vec.tolist() == [seq.uniform() for _ in range(100)]

    def test_normals_vectorized_matches_sequential(self):
        vec = Rng(42).normals(50)
        seq = Rng(42)
        assert vec.tolist() == [seq.normal() for _ in range(50)]

    def test_normal_consumes_two_raw_draws(self):
        a = Rng(7)
        a.normal()
        b = Rng(7)
        b._raw(2)
        assert a.next_u64() == b.next_u64()

    def test_uniform_bounds(self):
        u = Rng(9).uniforms(10_000, -2.0, 3.0)
        assert np.all(u >= -2.0) and np.all(u < 3.0)

    def test_uniform_reversed_bounds(self):
        with pytest.raises(ArgumentError):
            Rng(0).uniforms(1, 1.0, 0.0)

    def test_normals_moments(self):
        z = Rng(11).normals(200_000)
        assert abs(z.mean()) < 0.01
        assert abs(z.std() - 1.0) < 0.01

    def test_below_range_and_error(self):
        r = Rng(5)
        draws = [r.below(7) for _ in range(1000)]
        assert set(draws) == set(range(7))
        with pytest.raises(ArgumentError):
            r.below(0)

    def test_permutation_is_permutation(self):
        perm = Rng(3).permutation(100)
        assert sorted(perm) == list(range(100))

    def test_permutation_deterministic(self):
        assert Rng(3).permutation(20) == Rng(3).permutation(20)


class TestAffine:
    def test_identity(self):
        np.testing.assert_array_equal(affine(np.eye(2), [0, 0], [3, 4]), [3, 4])

    def test_hand_example(self):
        y = affine([[1, 2], [3, 4]], [1, 1], [1, 1])
        np.testing.assert_array_equal(y, [4, 8])

    def test_zero_weights(self):
        y = affine(np.zeros((3, 5)), [7, 7, 7], np.arange(5))
        np.testing.assert_array_equal(y, [7, 7, 7])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            affine(np.eye(2), [0, 0], [1, 2, 3])
        with pytest.raises(DimensionError):
            affine(np.eye(2), [0], [1, 2])

    @given(st.integers(0, 2**32))
    def test_linearity(self, seed):
        rng = Rng(seed)
        W = rng.normals(12).reshape(3, 4)
        b = rng.normals(3)
        x, y = rng.normals(4), rng.normals(4)
        alpha, beta = rng.uniform(-2, 2), rng.uniform(-2, 2)
        lhs = affine(W, b, alpha * x + beta * y)
        rhs = alpha * affine(W, np.zeros(3), x) + beta * affine(W, np.zeros(3), y) + b
        np.testing.assert_allclose(lhs, rhs, rtol=1e-6, atol=1e-9)


class TestSoftmax:
    def test_symmetry(self):
        np.testing.assert_allclose(softmax([0, 0, 0]), [1 / 3] * 3)

    def test_overflow_safe(self):
        s = softmax([1000.0, 0.0])
        assert np.all(np.isfinite(s))
        assert s[0] == pytest.approx(1.0)
        assert s[1] == pytest.approx(0.0, abs=1e-300)

    def test_hand_example(self):
        np.testing.assert_allclose(softmax([math.log(2), 0.0]), [2 / 3, 1 / 3])

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            softmax([])

    @given(st.integers(0, 2**32), st.integers(1, 4096))
    def test_simplex(self, seed, n):
        s = softmax(Rng(seed).uniforms(n, -50, 50))
        assert np.all(s >= 0)
        assert abs(s.sum() - 1.0) < 1e-6


class TestSigmoid:
    def test_zero(self):
        assert sigmoid(0.0) == 0.5

    def test_overflow_safe(self):
        assert sigmoid(-1000.0) == pytest.approx(0.0, abs=1e-300)
        assert sigmoid(1000.0) == pytest.approx(1.0)

    def test_hand_example(self):
        assert sigmoid(math.log(3)) == pytest.approx(0.75, abs=1e-15)

    @given(st.floats(-700, 700))
    def test_complement(self, x):
        assert sigmoid(x) + sigmoid(-x) == pytest.approx(1.0, abs=1e-12)


def test_relu():
    assert relu(-2.0) == 0.0
    assert relu(5.0) == 5.0
    np.testing.assert_array_equal(relu(np.array([-1.0, 0.0, 2.0])), [0.0, 0.0, 2.0])
