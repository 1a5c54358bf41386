"""Feature-matrix statistics: Pearson correlation map and the averaged
eigenvector-ratio feature contributions.

The contribution of feature i is the mean over eigenvectors of e_ij / s_j,
where s_j sums eigenvector j; eigenvector signs are fixed so each sum is
positive, which the ratio construction needs and which makes the
contributions sum to exactly 1.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, InvalidInputError

_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


def correlation_matrix(X):
    """Pearson correlation of the columns of X with (n-1)-denominator moments.

    Columns with zero variance yield NaN in their whole row and column (an
    explicit undefined marker rather than a silent zero).
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise InvalidInputError("correlation requires a 2-D matrix with at least 2 rows")
    if not np.isfinite(arr).all():
        raise InvalidInputError("feature matrix contains non-finite entries")
    m, n = arr.shape
    centered = arr - arr.mean(axis=0)
    cov = centered.T @ centered / (m - 1)
    var = np.diag(cov).copy()
    defined = var > 0
    corr = np.full((n, n), np.nan)
    if defined.any():
        scale = np.sqrt(var[defined])
        sub = cov[np.ix_(defined, defined)] / np.outer(scale, scale)
        np.fill_diagonal(sub, 1.0)
        corr[np.ix_(defined, defined)] = np.clip(sub, -1.0, 1.0)
    return corr


def jacobi_eigh(A, tol=_JACOBI_TOL, max_sweeps=_JACOBI_MAX_SWEEPS):
    """Eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns, both
    sorted by descending eigenvalue.  Raises AnalysisError when the
    off-diagonal norm fails to reach `tol` within `max_sweeps` sweeps.
    """
    A = np.array(A, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, atol=1e-10):
        raise InvalidInputError("jacobi_eigh expects a symmetric square matrix")
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2) * 2)
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) <= tol / (n * n):
                    continue
                # classic 2x2 rotation that zeroes A[p, q]
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    else:
        raise AnalysisError("Jacobi eigen decomposition did not converge")
    vals = np.diag(A).copy()
    order = np.argsort(vals)[::-1]
    return vals[order], V[:, order]


def fix_eigenvector_signs(vectors):
    """Flip eigenvector columns so each element sum is positive.

    A column summing to exactly zero is flipped so its largest-magnitude
    element is positive instead.
    """
    V = np.array(vectors, dtype=np.float64)
    for j in range(V.shape[1]):
        s = V[:, j].sum()
        if s < 0:
            V[:, j] = -V[:, j]
        elif s == 0:
            k = int(np.argmax(np.abs(V[:, j])))
            if V[k, j] < 0:
                V[:, j] = -V[:, j]
    return V


@dataclass
class ContributionReport:
    """Feature-contribution analysis output.

    contributions covers every input column (zero for excluded constant
    columns); the eigen data covers the included columns only.
    """

    contributions: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sums: np.ndarray
    ratios: np.ndarray
    included: np.ndarray = field(default=None)


def pca_contribution(X):
    """Contribution share of each feature column of X.

    X is z-scored per column; the eigenvectors of the resulting covariance
    matrix are sign-fixed, each converted to ratios by its element sum, and
    the ratios averaged across eigenvectors row-wise.  Zero-variance columns
    are excluded with a warning and contribute zero.
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError("pca_contribution expects a 2-D matrix")
    m, n = arr.shape
    if m <= n:
        raise InvalidInputError(f"need more rows than columns, got {m} rows for {n} columns")
    if not np.isfinite(arr).all():
        raise InvalidInputError("feature matrix contains non-finite entries")
    std = arr.std(axis=0, ddof=1)
    included = std > 0
    if not included.all():
        warnings.warn(f"excluding {int((~included).sum())} zero-variance column(s) "
                      "from the contribution analysis", stacklevel=2)
    if not included.any():
        raise InvalidInputError("every column has zero variance")
    sub = arr[:, included]
    z = (sub - sub.mean(axis=0)) / sub.std(axis=0, ddof=1)
    cov = z.T @ z / (m - 1)
    vals, vecs = jacobi_eigh(cov)
    vecs = fix_eigenvector_signs(vecs)
    sums = vecs.sum(axis=0)
    # an eigenvector whose elements cancel to ~0 cannot be converted to
    # ratios; it is skipped in the average, which keeps the contribution
    # total at exactly 1
    usable = np.abs(sums) > 1e-8
    if not usable.any():
        raise AnalysisError("every eigenvector has a vanishing element sum")
    ratios = np.full_like(vecs, np.nan)
    ratios[:, usable] = vecs[:, usable] / sums[usable]
    contrib_included = ratios[:, usable].sum(axis=1) / int(usable.sum())
    contributions = np.zeros(n)
    contributions[included] = contrib_included
    return ContributionReport(
        contributions=contributions,
        eigenvalues=vals,
        eigenvectors=vecs,
        sums=sums,
        ratios=ratios,
        included=included,
    )


def correlation_csv(corr, names):
    """CSV rendering of a correlation map with named rows/columns."""
    lines = ["," + ",".join(names)]
    for name, row in zip(names, np.asarray(corr)):
        cells = ["nan" if np.isnan(v) else f"{v:.6f}" for v in row]
        lines.append(name + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def contributions_csv(report, names):
    """Plot-ready (feature, value) rows for the contribution histogram."""
    lines = ["feature,contribution"]
    for name, value in zip(names, report.contributions):
        lines.append(f"{name},{value:.6f}")
    return "\n".join(lines) + "\n"
