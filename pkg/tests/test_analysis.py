import numpy as np
import pytest

from boneline.analysis import (ContributionReport, contributions_csv, correlation_csv,
                               correlation_matrix, fix_eigenvector_signs, jacobi_eigh,
                               pca_contribution)
from boneline.errors import InvalidInputError


def bruteforce_correlation(X):
    """Two-pass covariance oracle with explicit loops."""
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    means = [sum(X[:, j]) / m for j in range(n)]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            cov = sum((X[k, i] - means[i]) * (X[k, j] - means[j]) for k in range(m)) / (m - 1)
            si2 = sum((X[k, i] - means[i]) ** 2 for k in range(m)) / (m - 1)
            sj2 = sum((X[k, j] - means[j]) ** 2 for k in range(m)) / (m - 1)
            out[i, j] = cov / np.sqrt(si2 * sj2)
    return out


def analytic_eigs_3x3(A):
    """Characteristic-polynomial eigenvalues of a symmetric 3x3 matrix."""
    coeffs = np.poly(A)  # monic characteristic polynomial
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


class TestCorrelation:
    def test_self_correlation_is_one(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(20, 4))
        corr = correlation_matrix(X)
        assert np.allclose(np.diag(corr), 1.0)

    def test_negated_column(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=50)
        X = np.column_stack([x, -x])
        corr = correlation_matrix(X)
        assert corr[0, 1] == pytest.approx(-1.0)

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            X = rng.normal(size=(5, 4))
            assert np.allclose(correlation_matrix(X), bruteforce_correlation(X), atol=1e-12)

    def test_symmetric_unit_diag_bounded(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(30, 6)) * rng.uniform(0.1, 50, size=6)
        corr = correlation_matrix(X)
        assert np.allclose(corr, corr.T)
        assert np.allclose(np.diag(corr), 1.0)
        assert (np.abs(corr) <= 1.0 + 1e-12).all()

    def test_zero_variance_marked_undefined(self):
        X = np.column_stack([np.ones(10), np.arange(10.0)])
        corr = correlation_matrix(X)
        assert np.isnan(corr[0]).all()
        assert np.isnan(corr[:, 0]).all()
        assert corr[1, 1] == 1.0

    def test_too_few_rows(self):
        with pytest.raises(InvalidInputError):
            correlation_matrix(np.ones((1, 3)))


class TestJacobi:
    def test_matches_numpy_on_random_symmetric(self):
        rng = np.random.default_rng(4)
        for n in (2, 3, 5, 8):
            A = rng.normal(size=(n, n))
            A = (A + A.T) / 2
            vals, vecs = jacobi_eigh(A)
            ref = np.sort(np.linalg.eigvalsh(A))[::-1]
            assert np.allclose(vals, ref, atol=1e-9)
            # eigenvector property A v = lambda v
            for j in range(n):
                assert np.allclose(A @ vecs[:, j], vals[j] * vecs[:, j], atol=1e-8)

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidInputError):
            jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_sign_fixing(self):
        V = np.array([[-0.8, 0.6], [-0.6, -0.8]])
        fixed = fix_eigenvector_signs(V)
        assert fixed[:, 0].sum() > 0
        # second column sums to -0.2 -> flipped
        assert fixed[:, 1].sum() > 0


class TestContribution:
    def test_identity_covariance_uniform(self):
        # exactly decorrelated unit-variance columns: the covariance is the
        # identity, eigenvectors are the axes, and every contribution is 1/n
        rng = np.random.default_rng(5)
        X = rng.normal(size=(5000, 4))
        X = X - X.mean(axis=0)
        cov = X.T @ X / (len(X) - 1)
        X = X @ np.linalg.inv(np.linalg.cholesky(cov)).T
        report = pca_contribution(X)
        assert np.allclose(report.contributions, 0.25, atol=1e-9)

    def test_contributions_sum_to_one(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            X = rng.normal(size=(40, 5)) * rng.uniform(0.5, 20, size=5)
            report = pca_contribution(X)
            assert report.contributions.sum() == pytest.approx(1.0, abs=1e-9)

    def test_planted_covariance_eigenvalues(self):
        rng = np.random.default_rng(7)
        cov = np.array([[4.0, 1.2, 0.4],
                        [1.2, 2.5, 0.3],
                        [0.4, 0.3, 1.0]])
        L = np.linalg.cholesky(cov)
        X = rng.normal(size=(20000, 3)) @ L.T
        report = pca_contribution(X)
        # the analysis z-scores columns, so compare on the correlation matrix
        d = np.sqrt(np.diag(cov))
        corr = cov / np.outer(d, d)
        expected = analytic_eigs_3x3(corr)
        assert np.allclose(report.eigenvalues, expected, atol=0.05)
        # and the eigen solver itself is exact on the planted matrix
        vals, _ = jacobi_eigh(corr)
        assert np.allclose(vals, expected, atol=1e-8)

    def test_covariance_psd_and_sorted(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(60, 6))
        report = pca_contribution(X)
        assert (report.eigenvalues >= -1e-9).all()
        assert (np.diff(report.eigenvalues) <= 1e-12).all()

    def test_column_permutation_permutes_contributions(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(50, 4)) * np.array([1.0, 3.0, 0.5, 7.0])
        perm = [2, 0, 3, 1]
        base = pca_contribution(X).contributions
        permuted = pca_contribution(X[:, perm]).contributions
        assert np.allclose(permuted, base[perm], atol=1e-9)

    def test_zero_variance_column_excluded_with_warning(self):
        rng = np.random.default_rng(10)
        X = np.column_stack([rng.normal(size=30), np.full(30, 2.0), rng.normal(size=30)])
        with pytest.warns(UserWarning):
            report = pca_contribution(X)
        assert report.contributions[1] == 0.0
        assert report.contributions.sum() == pytest.approx(1.0, abs=1e-6)

    def test_requires_more_rows_than_columns(self):
        with pytest.raises(InvalidInputError):
            pca_contribution(np.ones((3, 3)))

    def test_ratio_rows_sum_to_one_per_eigenvector(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(40, 4))
        report = pca_contribution(X)
        assert np.allclose(report.ratios.sum(axis=0), 1.0, atol=1e-9)


class TestCsvOutputs:
    def test_correlation_csv_shape(self):
        corr = np.array([[1.0, 0.5], [0.5, 1.0]])
        text = correlation_csv(corr, ["A", "B"])
        lines = text.strip().splitlines()
        assert lines[0] == ",A,B"
        assert lines[1].startswith("A,1.000000")

    def test_contributions_csv(self):
        report = ContributionReport(contributions=np.array([0.75, 0.25]),
                                    eigenvalues=np.array([1.5, 0.5]),
                                    eigenvectors=np.eye(2), sums=np.ones(2),
                                    ratios=np.eye(2))
        text = contributions_csv(report, ["A", "B"])
        assert text.splitlines()[0] == "feature,contribution"
        assert "A,0.750000" in text
