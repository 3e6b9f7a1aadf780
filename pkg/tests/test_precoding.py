import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patterndiv.channel import (
    ClusterGeometry,
    ClusterSpectrum,
    SupportSet,
    dft_column,
    dft_matrix,
    eigen_spectrum,
    sample_channel,
    support_set,
)
from patterndiv.coloring import PatternAssignment
from patterndiv.precoding import (
    PreBeamformer,
    SingularChannelError,
    cluster_rate,
    effective_channel,
    feasibility,
    gamma_eta,
    prebeamformer,
    residual_ici,
    zf_precoder,
)


def S(*idx, M=8):
    return SupportSet.of(idx, M)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


class TestPrebeamformer:
    def test_alone_on_pattern(self):
        pre = prebeamformer([S(2, 3, 4), S(2, 3)], PatternAssignment((0, 1), 2), 0)
        assert pre.columns == (2, 3, 4) and pre.Ng == 3

    def test_partial_overlap(self):
        sups = [S(1, 2, 3), S(3, 4)]
        assign = PatternAssignment((0, 0), 1)
        assert prebeamformer(sups, assign, 0).columns == (1, 2)
        assert prebeamformer(sups, assign, 1).columns == (4,)

    def test_full_overlap(self):
        sups = [S(2, 3), S(1, 2, 3, 4)]
        pre = prebeamformer(sups, PatternAssignment((0, 0), 1), 0)
        assert pre.columns == () and pre.Ng == 0
        assert not feasibility(pre, 1)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            prebeamformer([S(1)], PatternAssignment((0, 0), 1), 0)

    @settings(max_examples=200)
    @given(st.lists(st.frozensets(st.integers(0, 15), max_size=8), min_size=2, max_size=6),
           st.data())
    def test_monotone_and_disjoint(self, sets, data):
        sups = [SupportSet.of(s, 16) for s in sets]
        G = len(sups)
        pattern = data.draw(st.lists(st.integers(0, 2), min_size=G, max_size=G))
        assign = PatternAssignment(tuple(pattern), 3)
        for g in range(G):
            pre = prebeamformer(sups, assign, g)
            assert set(pre.columns) <= sups[g].members
            for h in assign.co_pattern(g):
                assert not set(pre.columns) & sups[h].members
        # Move one more cluster onto pattern 0: no incumbent gains directions.
        mover = data.draw(st.integers(0, G - 1))
        moved = PatternAssignment(tuple(0 if g == mover else p for g, p in enumerate(pattern)), 3)
        for g in range(G):
            if g != mover and pattern[g] == 0:
                assert prebeamformer(sups, moved, g).Ng <= prebeamformer(sups, assign, g).Ng


class TestGammaEta:
    def test_pair_only(self):
        sups = [S(1, 2, 3), S(3, 4)]
        assert gamma_eta(0, 1, sups) == (3, 0)
        assign = PatternAssignment((0, 0), 1)
        assert prebeamformer(sups, assign, 0).Ng + prebeamformer(sups, assign, 1).Ng == 3

    def test_with_third_cluster(self):
        sups = [S(1, 2, 3), S(3, 4), S(4, 5)]
        assert gamma_eta(0, 1, sups) == (3, 1)
        assign = PatternAssignment((0, 0, 0), 1)
        assert (prebeamformer(sups, assign, 0).Ng, prebeamformer(sups, assign, 1).Ng) == (2, 0)

    def test_identical(self):
        sups = [S(2, 3, 4), S(2, 3, 4)]
        assert gamma_eta(0, 1, sups)[0] == 0
        assign = PatternAssignment((0, 0), 1)
        assert prebeamformer(sups, assign, 0).Ng == prebeamformer(sups, assign, 1).Ng == 0

    def test_triple_overlap_counted_twice(self):
        # Index 3 is in all three supports.  A single subtraction of the
        # triple term would give eta = 1 and gamma - eta = 1, but Ng + Ng2 = 2.
        sups = [S(1, 2, 3), S(2, 3, 4), S(3)]
        gamma, eta = gamma_eta(0, 1, sups)
        assert (gamma, eta) == (2, 0)
        assign = PatternAssignment((0, 0, 0), 1)
        assert prebeamformer(sups, assign, 0).Ng + prebeamformer(sups, assign, 1).Ng == 2

    def test_same_cluster(self):
        with pytest.raises(ValueError):
            gamma_eta(1, 1, [S(1), S(2)])

    @settings(max_examples=500)
    @given(st.lists(st.frozensets(st.integers(0, 23), max_size=10), min_size=2, max_size=5),
           st.data())
    def test_identity_on_arbitrary_sets(self, sets, data):
        sups = [SupportSet.of(s, 24) for s in sets]
        g, h = data.draw(st.lists(st.integers(0, len(sups) - 1), min_size=2, max_size=2, unique=True))
        assign = PatternAssignment((0,) * len(sups), 1)
        gamma, eta = gamma_eta(g, h, sups)
        assert gamma >= 0 and eta >= 0
        assert prebeamformer(sups, assign, g).Ng + prebeamformer(sups, assign, h).Ng == gamma - eta


class TestEffectiveChannel:
    def test_single_direction(self):
        row = np.array([[1.0 + 2j, -0.5j]])
        H = dft_column(8, 3)[:, None] @ row
        np.testing.assert_allclose(effective_channel(H, PreBeamformer(0, (3,)), 8), row, atol=1e-14)

    def test_orthogonal_directions(self, rng):
        spec = ClusterSpectrum(S(2, 3, 4), np.array([3.0, 2.0, 3.0]))
        H = sample_channel(spec, 2, rng)
        assert np.linalg.norm(effective_channel(H, PreBeamformer(0, (5, 6)), 8)) < 1e-10

    def test_matches_dft_coefficients(self, rng):
        geom = ClusterGeometry(0, 0.0, math.pi / 6)
        spec = eigen_spectrum(geom, support_set(geom, 8, 0.5), 0.5, 8)
        H = sample_channel(spec, 2, rng)
        coeffs = dft_matrix(8).conj().T @ H
        np.testing.assert_allclose(effective_channel(H, PreBeamformer(0, (2, 3)), 8),
                                   coeffs[[2, 3]], atol=1e-12)

    def test_empty_prebeamformer(self):
        with pytest.raises(ValueError):
            effective_channel(np.zeros((8, 2)), PreBeamformer(0, ()), 8)


class TestResidualICI:
    def test_disjoint_columns_null_interference(self, rng):
        sups = [S(1, 2, 3, 4, M=16), S(3, 4, 5, 6, M=16)]
        assign = PatternAssignment((0, 0), 1)
        pre0 = prebeamformer(sups, assign, 0)
        other = ClusterSpectrum(sups[1], np.full(4, 4.0))
        H1 = sample_channel(other, 2, rng)
        assert residual_ici(H1, pre0) < 1e-10
        assert residual_ici(H1, pre0, relative=True) < 1e-10

    def test_corrupted_prebeamformer_leaks(self, rng):
        other = ClusterSpectrum(S(3, 4, 5, 6, M=16), np.full(4, 4.0))
        H1 = sample_channel(other, 2, rng)
        assert residual_ici(H1, PreBeamformer(0, (1, 2, 4)), relative=True) > 1e-3

    def test_empty(self):
        assert residual_ici(np.ones((8, 2)), PreBeamformer(0, ())) == 0.0


class TestZF:
    def test_identity(self):
        U = zf_precoder(np.eye(2, dtype=complex), 2)
        np.testing.assert_allclose(U.matrix, np.eye(2), atol=1e-14)

    def test_diagonalizes(self, rng):
        for _ in range(20):
            H = crandn(rng, 5, 3)
            U = zf_precoder(H, 3).matrix
            A = H.conj().T @ U
            off = A - np.diag(np.diag(A))
            assert np.max(np.abs(off)) < 1e-9 * np.max(np.abs(A))
            np.testing.assert_allclose(np.linalg.norm(U, axis=0), 1.0)

    def test_matches_least_squares(self, rng):
        H = crandn(rng, 4, 2)
        # Minimum-norm solution of H^H X = I is the pseudo-inverse direction.
        X, *_ = np.linalg.lstsq(H.conj().T, np.eye(2), rcond=None)
        X /= np.linalg.norm(X, axis=0, keepdims=True)
        np.testing.assert_allclose(zf_precoder(H, 2).matrix, X, atol=1e-10)

    def test_serves_first_users(self, rng):
        H = crandn(rng, 4, 3)
        U = zf_precoder(H, 2).matrix
        assert U.shape == (4, 2)
        A = H[:, :2].conj().T @ U
        assert abs(A[0, 1]) < 1e-10 and abs(A[1, 0]) < 1e-10

    def test_rank_deficient(self):
        H = np.array([[1, 2], [2, 4], [0, 0]], dtype=complex)
        with pytest.raises(SingularChannelError):
            zf_precoder(H, 2)

    def test_dimension_check(self, rng):
        with pytest.raises(ValueError):
            zf_precoder(crandn(rng, 1, 2), 2)

    def test_power_share(self):
        assert zf_precoder(np.eye(2), 2, powerShare=2.5).powerShare == 2.5


class TestRate:
    def test_identity_channel(self):
        assert cluster_rate(np.eye(2), np.eye(2), Pt=2.0, Ktotal=2, sigma2=1.0) == pytest.approx(2.0)

    def test_zero_channel(self):
        assert cluster_rate(np.zeros((3, 2)), np.eye(3)[:, :2], 10.0, 4, 1.0) == 0.0

    def test_matches_determinant(self, rng):
        for _ in range(10):
            Heff = crandn(rng, 2, 2)
            U = zf_precoder(Heff, 2)
            A = Heff.conj().T @ U.matrix
            snr = 10.0 / (8 * 0.7)
            M = np.eye(2) + snr * A @ A.conj().T
            det = (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]).real
            assert cluster_rate(Heff, U, 10.0, 8, 0.7) == pytest.approx(math.log2(det), abs=1e-9)

    def test_monotone(self, rng):
        Heff = crandn(rng, 4, 2)
        U = zf_precoder(Heff, 2)
        rates_pt = [cluster_rate(Heff, U, pt, 8, 1.0) for pt in (0.1, 1.0, 10.0, 100.0)]
        rates_s2 = [cluster_rate(Heff, U, 10.0, 8, s2) for s2 in (0.1, 1.0, 10.0)]
        assert rates_pt == sorted(rates_pt)
        assert rates_s2 == sorted(rates_s2, reverse=True)
        assert all(r >= 0 for r in rates_pt + rates_s2)

    def test_accepts_plain_matrix(self, rng):
        Heff = crandn(rng, 3, 2)
        U = zf_precoder(Heff, 2)
        assert cluster_rate(Heff, U.matrix, 10, 4, 1) == cluster_rate(Heff, U, 10, 4, 1)


class TestFeasibility:
    @pytest.mark.parametrize("cols, Kg, ok", [((1, 2, 3), 2, True), ((), 1, False), ((4,), 2, False)])
    def test_examples(self, cols, Kg, ok):
        assert feasibility(PreBeamformer(0, cols), Kg) is ok
