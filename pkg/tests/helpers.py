"""Shared random-spec generators for the test suite."""

from __future__ import annotations

import numpy as np

from gmd import DistributionSpec, PairParams, ValidatedSpec, validate


def random_normal_spec(rng: np.random.Generator, n: int | None = None) -> ValidatedSpec:
    """A well-conditioned random normal spec with dimension n in {2,3,4}."""
    n = n or int(rng.integers(2, 5))
    a = rng.normal(size=(n, n))
    sigma = a @ a.T + 0.5 * n * np.eye(n)
    mu = rng.normal(0.0, 2.0, n)
    return validate(DistributionSpec("normal", mu, sigma))


def random_student_spec(
    rng: np.random.Generator, nu: float, n: int | None = None
) -> ValidatedSpec:
    n = n or int(rng.integers(2, 5))
    a = rng.normal(size=(n, n))
    sigma = a @ a.T + 0.5 * n * np.eye(n)
    mu = rng.normal(0.0, 2.0, n)
    return validate(DistributionSpec("student-t", mu, sigma, nu=nu))


def random_exchangeable_spec(
    rng: np.random.Generator,
    family: str = "normal",
    nu: float | None = None,
    equicorrelated: bool = True,
    n: int | None = None,
) -> ValidatedSpec:
    """Equal means and variances; either one common rho or a random
    correlation matrix with unit diagonal."""
    n = n or int(rng.integers(2, 5))
    sigma1 = float(rng.uniform(0.5, 3.0))
    mu1 = float(rng.normal(0.0, 2.0))
    if equicorrelated:
        # Equicorrelation matrices are positive definite for
        # rho in (-1/(n-1), 1).
        rho = float(rng.uniform(-1.0 / (n - 1) + 0.05, 0.95))
        corr = np.full((n, n), rho)
        np.fill_diagonal(corr, 1.0)
    else:
        a = rng.normal(size=(n, n + 2))
        raw = a @ a.T + 0.1 * np.eye(n)
        d = np.sqrt(np.diag(raw))
        corr = raw / np.outer(d, d)
    sigma = sigma1**2 * corr
    return validate(
        DistributionSpec(family, np.full(n, mu1), sigma, nu=nu)
    )


def random_pair(rng: np.random.Generator, max_abs_rho: float = 0.98) -> PairParams:
    return PairParams(
        mu_i=float(rng.normal(0.0, 3.0)),
        mu_j=float(rng.normal(0.0, 3.0)),
        sigma_i=float(rng.uniform(0.2, 4.0)),
        sigma_j=float(rng.uniform(0.2, 4.0)),
        rho_ij=float(rng.uniform(-max_abs_rho, max_abs_rho)),
    )


def folded_normal_mean(m: float, s: float) -> float:
    """E|N(m, s^2)| through the folded-normal formula; test-side oracle."""
    from scipy.special import ndtr

    if s == 0:
        return abs(m)
    z = m / s
    return float(2.0 * s * np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi) + m * (2.0 * ndtr(z) - 1.0))


def pair_diff_params(p: PairParams) -> tuple[float, float]:
    """(location, scale) of the difference X_i - X_j."""
    m = p.mu_i - p.mu_j
    s = np.sqrt(p.sigma_i**2 + p.sigma_j**2 - 2 * p.rho_ij * p.sigma_i * p.sigma_j)
    return m, float(s)
