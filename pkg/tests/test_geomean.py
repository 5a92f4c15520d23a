import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqexp import matops
from cqexp.errors import InputError, NonConvergenceError, SingularityError
from cqexp.geomean import GeomeanConfig, weighted_geomean, weighted_geomean_limit
from cqexp.sampling import sample_pd, zero_smallest

seeds = st.integers(min_value=0, max_value=2**32 - 1)
unit = st.floats(0.0, 1.0)


def pd_pair(seed, d, max_cond=1e3):
    rng = np.random.default_rng(seed)
    return sample_pd(rng, d, max_cond), sample_pd(rng, d, max_cond)


def close(X, Y, rtol=1e-9):
    return np.abs(X - Y).max() <= rtol * max(1.0, np.abs(Y).max())


class TestWeightedGeomean:
    def test_scalar(self):
        np.testing.assert_allclose(weighted_geomean([[4.0]], [[9.0]], 0.5), [[6.0]], rtol=1e-14)

    def test_endpoints(self):
        A, B = pd_pair(1, 4)
        assert close(weighted_geomean(A, B, 0.0), A)
        assert close(weighted_geomean(A, B, 1.0), B)

    def test_identity_first_argument(self):
        _, B = pd_pair(2, 3)
        assert close(weighted_geomean(np.eye(3), B, 0.37), matops.matrix_power(B, 0.37))

    def test_singular_first_argument_refused(self):
        with pytest.raises(SingularityError):
            weighted_geomean(np.diag([1.0, 0.0]), np.eye(2), 0.5)

    def test_singular_second_argument_outside_unit_interval(self):
        with pytest.raises(SingularityError):
            weighted_geomean(np.eye(2), np.diag([1.0, 0.0]), 1.5)
        # inside [0, 1] a singular B is fine
        np.testing.assert_allclose(weighted_geomean(np.eye(2), np.diag([4.0, 0.0]), 0.5), np.diag([2.0, 0.0]))

    def test_extrapolated_weight(self):
        A, B = pd_pair(3, 3)
        G = weighted_geomean(A, B, 2.0)
        # A #_2 B = B A^{-1} B
        assert close(G, B @ np.linalg.inv(A) @ B, 1e-8)
        assert matops.is_positive_definite(G)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            weighted_geomean(np.eye(2), np.eye(3), 0.5)

    def test_ill_conditioned_pair_stays_psd(self):
        rng = np.random.default_rng(11)
        A = sample_pd(rng, 5, 1e6)
        B = sample_pd(rng, 5, 1e6)
        G = weighted_geomean(A, B, 0.5)
        # symmetric mean solves the Riccati equation G A^{-1} G = B
        assert close(G @ np.linalg.solve(A, G), B, 1e-6)
        assert matops.eigvals(G)[-1] > 0


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 5), unit)
    def test_commuting(self, seed, d, s):
        rng = np.random.default_rng(seed)
        U = matops.random_unitary(rng, d)
        a, b = rng.uniform(0.1, 5, d), rng.uniform(0.1, 5, d)
        A, B = matops.from_spectrum(U, a), matops.from_spectrum(U, b)
        assert close(weighted_geomean(A, B, s), matops.from_spectrum(U, a ** (1 - s) * b**s))

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 5), unit, st.floats(0.01, 10), st.floats(0.01, 10))
    def test_joint_homogeneity(self, seed, d, s, a, b):
        A, B = pd_pair(seed, d)
        lhs = weighted_geomean(a * A, b * B, s)
        rhs = a ** (1 - s) * b**s * weighted_geomean(A, B, s)
        assert close(lhs, rhs, 1e-8)

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 5), unit)
    def test_monotone(self, seed, d, s):
        A, B = pd_pair(seed, d)
        C = A + matops.random_pd(d, seed + 1)
        D = B + matops.random_pd(d, seed + 2)
        assert matops.loewner_margin(weighted_geomean(A, B, s), weighted_geomean(C, D, s)) >= -1e-9

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 5), unit)
    def test_congruence(self, seed, d, s):
        A, B = pd_pair(seed, d)
        rng = np.random.default_rng(seed + 7)
        M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) + 2 * np.eye(d)
        lhs = M @ weighted_geomean(A, B, s) @ M.conj().T
        rhs = weighted_geomean(M @ A @ M.conj().T, M @ B @ M.conj().T, s)
        assert close(lhs, rhs, 1e-7)

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 5), unit)
    def test_self_duality(self, seed, d, s):
        A, B = pd_pair(seed, d)
        G = weighted_geomean(A, B, s)
        assert close(G, weighted_geomean(B, A, 1 - s), 1e-8)
        assert close(np.linalg.inv(G), weighted_geomean(np.linalg.inv(A), np.linalg.inv(B), s), 1e-7)

    def test_symmetric_mean_is_symmetric(self):
        A, B = pd_pair(5, 4)
        assert close(weighted_geomean(A, B, 0.5), weighted_geomean(B, A, 0.5))

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 4), unit, unit)
    def test_concavity(self, seed, d, s, lam):
        A, C = pd_pair(seed, d)
        B, D = pd_pair(seed + 1, d)
        lhs = weighted_geomean(lam * A + (1 - lam) * B, lam * C + (1 - lam) * D, s)
        rhs = lam * weighted_geomean(A, C, s) + (1 - lam) * weighted_geomean(B, D, s)
        assert matops.loewner_margin(rhs, lhs) >= -1e-9

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 5), unit)
    def test_harmonic_geometric_arithmetic(self, seed, d, s):
        A, B = pd_pair(seed, d)
        G = weighted_geomean(A, B, s)
        H = np.linalg.inv((1 - s) * np.linalg.inv(A) + s * np.linalg.inv(B))
        assert matops.loewner_margin(H, G) >= -1e-9
        assert matops.loewner_margin(G, (1 - s) * A + s * B) >= -1e-9

    def test_continuity(self):
        A, B = pd_pair(9, 3)
        G = weighted_geomean(A, B, 0.3)
        errs = [
            np.linalg.norm(weighted_geomean(A + e * np.eye(3), B + e * np.eye(3), 0.3) - G, 2)
            for e in (1e-2, 1e-4, 1e-6, 1e-8)
        ]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-6


class TestLimit:
    def test_equal_singular(self):
        A = np.diag([1.0, 0.0])
        np.testing.assert_allclose(weighted_geomean_limit(A, A, 0.5), A, atol=1e-12)

    def test_pd_matches_direct(self):
        A, B = pd_pair(4, 4)
        assert close(weighted_geomean_limit(A, B, 0.3), weighted_geomean(A, B, 0.3))

    def test_orthogonal_supports_annihilate(self):
        # Oracle: (1+e)^{1/2} e^{1/2} on the diagonal at e = 1e-2, 1e-4, 1e-6,
        # extrapolated in powers of sqrt(e), gives a limit of 5e-7 -> 0.
        G = weighted_geomean_limit(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), 0.5)
        np.testing.assert_allclose(G, np.zeros((2, 2)), atol=1e-12)

    @pytest.mark.parametrize("s", [0.1, 0.3, 0.5, 0.9])
    def test_partial_overlap_closed_form(self, s):
        # range A ∩ range B is spanned by v = (e1 + e2)/sqrt(2); the shorted
        # operators there are 4/3 and 1.  Cross-checked against a 120-digit
        # evaluation at eps = 1e-60, 1e-90 (0.611543169761601 at s = 0.3).
        A = np.diag([2.0, 1.0, 0.0])
        B = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
        v = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
        expected = (4 / 3) ** (1 - s) * np.outer(v, v)
        np.testing.assert_allclose(weighted_geomean_limit(A, B, s), expected, atol=1e-12)

    def test_frozen_value(self):
        A = np.diag([2.0, 1.0, 0.0])
        B = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
        assert weighted_geomean_limit(A, B, 0.3)[0, 0].real == pytest.approx(0.611543169761601, abs=1e-14)

    def test_self_dual_on_singular(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            A = zero_smallest(sample_pd(rng, 4, 1e3), 1)
            B = zero_smallest(sample_pd(rng, 4, 1e3), 2)
            s = rng.uniform()
            assert close(weighted_geomean_limit(A, B, s), weighted_geomean_limit(B, A, 1 - s), 1e-8)

    def test_matches_regularised_sequence(self):
        # Support limit against the eps sequence for a generic singular pair.
        rng = np.random.default_rng(17)
        A = zero_smallest(sample_pd(rng, 3, 10), 1)
        B = zero_smallest(sample_pd(rng, 3, 10), 1)
        L = weighted_geomean_limit(A, B, 0.5)
        errs = [
            np.abs(weighted_geomean(A + e * np.eye(3), B + e * np.eye(3), 0.5, psd_tol=1e-13) - L).max()
            for e in (1e-4, 1e-6, 1e-8, 1e-10)
        ]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-4

    def test_endpoints(self):
        A, B = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        np.testing.assert_array_equal(weighted_geomean_limit(A, B, 0.0), A)
        np.testing.assert_array_equal(weighted_geomean_limit(A, B, 1.0), B)

    def test_rejects_weight_outside_unit_interval(self):
        with pytest.raises(InputError):
            weighted_geomean_limit(np.eye(2), np.eye(2), 1.5)

    def test_schedule_converges(self):
        cfg = GeomeanConfig(eps_schedule=(1e-6, 1e-9, 1e-12), method="schedule")
        A = np.diag([1.0, 0.0])
        np.testing.assert_allclose(weighted_geomean_limit(A, A, 0.5, cfg), A, atol=1e-8)

    def test_schedule_non_convergence_carries_iterates(self):
        cfg = GeomeanConfig(method="schedule")
        A = np.diag([1.0, 0.0])
        with pytest.raises(NonConvergenceError) as info:
            weighted_geomean_limit(A, A, 0.5, cfg)
        assert len(info.value.iterates) == 2
        np.testing.assert_allclose(info.value.iterates[-1], A + 1e-8 * np.eye(2), atol=1e-12)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eps_schedule": (1e-6, 1e-4)},
            {"eps_schedule": (1e-4, 0.0)},
            {"eps_schedule": ()},
            {"convergence_tol": 0.0},
            {"method": "bogus"},
        ],
    )
    def test_config_validation(self, kwargs):
        with pytest.raises(InputError):
            GeomeanConfig(**kwargs)
