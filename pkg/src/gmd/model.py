"""Parameter containers and validation for distributions and variable pairs.

A ``DistributionSpec`` describes a location-scale family (multivariate
normal or Student-t) through a location vector mu and a positive-definite
scale matrix sigma.  ``validate`` turns it into an immutable
``ValidatedSpec`` with a cached Cholesky factor, or raises with the full
list of violated invariants.  Pairwise slices (``PairParams``) and their
derived constants (``PairDerived``) feed every formula downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .special import DegreesOfFreedom

# Relative floors shared by validation and pair extraction.
SYMMETRY_RTOL = 1e-12
PIVOT_RTOL = 1e-12
RHO_CLAMP = 1e-12


class Family(str, Enum):
    NORMAL = "normal"
    STUDENT_T = "student-t"


class GmdMethod(str, Enum):
    CLOSED_FORM = "ClosedForm"
    QUADRATURE = "Quadrature"
    MONTE_CARLO = "MonteCarlo"
    QUANTILE = "Quantile"


@dataclass
class DistributionSpec:
    """Raw, unvalidated description of the joint law."""

    family: Family
    mu: Sequence[float]
    sigma_mat: Sequence[Sequence[float]]
    nu: float | None = None


@dataclass(frozen=True)
class ValidatedSpec:
    """A spec that passed validation; arrays are read-only.

    ``chol`` is the lower Cholesky factor of the (symmetrized) scale
    matrix, shared by sampling and by scale extraction.
    """

    family: Family
    mu: np.ndarray
    sigma_mat: np.ndarray
    chol: np.ndarray
    dof: DegreesOfFreedom | None

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def scale_sd(self, k: int) -> float:
        """Marginal scale sqrt(sigma_kk)."""
        return float(math.sqrt(self.sigma_mat[k, k]))

    def rho(self, i: int, j: int) -> float:
        r = float(self.sigma_mat[i, j] / (self.scale_sd(i) * self.scale_sd(j)))
        if abs(r) > 1.0:
            if abs(r) - 1.0 > RHO_CLAMP:
                raise ValidationError([f"correlation ({i},{j}) = {r} outside [-1, 1]"])
            r = math.copysign(1.0, r)
        return r

    def pairs(self) -> list[tuple[int, int]]:
        n = self.n
        return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class PairParams:
    """The (mu_i, mu_j, sigma_i, sigma_j, rho_ij) slice of one pair."""

    mu_i: float
    mu_j: float
    sigma_i: float
    sigma_j: float
    rho_ij: float

    def __post_init__(self) -> None:
        problems = []
        for name in ("mu_i", "mu_j", "sigma_i", "sigma_j", "rho_ij"):
            if not math.isfinite(getattr(self, name)):
                problems.append(f"{name} must be finite")
        if self.sigma_i <= 0 or self.sigma_j <= 0:
            problems.append("sigma_i and sigma_j must be > 0")
        if abs(self.rho_ij) > 1.0:
            if abs(self.rho_ij) - 1.0 <= RHO_CLAMP:
                object.__setattr__(self, "rho_ij", math.copysign(1.0, self.rho_ij))
            else:
                problems.append(f"|rho_ij| = {abs(self.rho_ij)} > 1")
        if problems:
            raise ValidationError(problems)

    def swapped(self) -> "PairParams":
        return PairParams(self.mu_j, self.mu_i, self.sigma_j, self.sigma_i, self.rho_ij)

    def diff_sd(self) -> float:
        """Standard deviation (in scale units) of X_i - X_j."""
        v = self.sigma_i**2 + self.sigma_j**2 - 2.0 * self.rho_ij * self.sigma_i * self.sigma_j
        return math.sqrt(max(v, 0.0))


@dataclass(frozen=True)
class PairDerived:
    """Derived pair constants: c, tau, lambda, and the reliability R_ij."""

    c_ij: float
    tau_ij: float
    lambda_ij: float
    r_ij: float
    degenerate: bool = False


@dataclass
class GmdResult:
    """A GMD value with its provenance and per-pair breakdown.

    Diagnostics are numeric (error estimates, sample counts, subdivision
    counts) plus the algorithm-name constants recorded by the sampler.
    """

    value: float
    method: GmdMethod
    pair_contributions: list[tuple[tuple[int, int], float]]
    diagnostics: dict[str, float | str] = field(default_factory=dict)

    @classmethod
    def from_pairs(
        cls,
        method: GmdMethod,
        contributions: list[tuple[tuple[int, int], float]],
        diagnostics: dict[str, float | str] | None = None,
    ) -> "GmdResult":
        value = sum(v for _, v in contributions) / len(contributions)
        return cls(value, method, contributions, diagnostics or {})

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "method": self.method.value,
            "pair_contributions": [
                {"pair": [i, j], "value": v} for (i, j), v in self.pair_contributions
            ],
            "diagnostics": dict(self.diagnostics),
        }


def validate(
    spec: DistributionSpec | ValidatedSpec,
    require_mean: bool = False,
    require_variance: bool = False,
) -> ValidatedSpec:
    """Check every invariant of a spec and cache its Cholesky factor.

    Raises ``ValidationError`` carrying the complete list of violations.
    Validating an already-validated spec returns it unchanged.
    """
    if isinstance(spec, ValidatedSpec):
        _check_moments(spec.family, spec.dof, require_mean, require_variance)
        return spec

    problems: list[str] = []

    if not isinstance(spec.family, Family):
        try:
            family = Family(spec.family)
        except ValueError:
            raise ValidationError([f"unknown family {spec.family!r}"]) from None
    else:
        family = spec.family

    mu = np.atleast_1d(np.asarray(spec.mu, dtype=float))
    sigma = np.atleast_2d(np.asarray(spec.sigma_mat, dtype=float))
    n = mu.shape[0]

    if mu.ndim != 1:
        problems.append("mu must be a vector")
    if n < 2:
        problems.append(f"dimension must be >= 2, got {n}")
    if sigma.ndim != 2 or sigma.shape != (n, n):
        problems.append(f"sigma must be {n}x{n}, got shape {sigma.shape}")
    if not np.all(np.isfinite(mu)):
        problems.append("mu contains non-finite entries")
    if not np.all(np.isfinite(sigma)):
        problems.append("sigma contains non-finite entries")

    dof: DegreesOfFreedom | None = None
    if family is Family.STUDENT_T:
        if spec.nu is None:
            problems.append("student-t spec requires nu")
        else:
            try:
                dof = DegreesOfFreedom(float(spec.nu))
            except DomainError as exc:
                problems.append(str(exc))
    elif spec.nu is not None:
        problems.append("nu is only meaningful for the student-t family")

    chol = None
    if not problems:
        scale = float(np.max(np.abs(sigma))) or 1.0
        if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_RTOL * scale:
            problems.append("sigma is not symmetric (relative tolerance 1e-12)")
        else:
            sigma = 0.5 * (sigma + sigma.T)
            if np.any(np.diag(sigma) <= 0):
                problems.append("sigma has non-positive diagonal entries")
            else:
                pivot_floor = PIVOT_RTOL * float(np.max(np.diag(sigma)))
                try:
                    chol = np.linalg.cholesky(sigma)
                except np.linalg.LinAlgError:
                    problems.append("sigma is not positive definite (Cholesky failed)")
                else:
                    if float(np.min(np.diag(chol)) ** 2) <= pivot_floor:
                        chol = None
                        problems.append(
                            "sigma is numerically singular (Cholesky pivot below "
                            "1e-12 of max diagonal)"
                        )

    try:
        _check_moments(family, dof, require_mean, require_variance)
    except ValidationError as exc:
        problems.extend(exc.violations)

    if problems:
        raise ValidationError(problems)

    assert chol is not None
    mu = mu.copy()
    sigma = sigma.copy()
    for arr in (mu, sigma, chol):
        arr.setflags(write=False)
    return ValidatedSpec(family, mu, sigma, chol, dof)


def _check_moments(
    family: Family,
    dof: DegreesOfFreedom | None,
    require_mean: bool,
    require_variance: bool,
) -> None:
    if family is not Family.STUDENT_T or dof is None:
        return
    problems = []
    if require_mean and dof.nu <= 1:
        problems.append(
            f"mean-requiring operation declared but nu = {dof.nu} <= 1 "
            "(mean-existence check)"
        )
    if require_variance and dof.nu <= 2:
        problems.append(
            f"variance-requiring operation declared but nu = {dof.nu} <= 2 "
            "(variance-existence check)"
        )
    if problems:
        raise ValidationError(problems)


def pair_params(spec: ValidatedSpec, i: int, j: int) -> PairParams:
    """Extract the pairwise parameters for coordinates i < j (0-based)."""
    n = spec.n
    if not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"pair indices ({i},{j}) out of range for n = {n}")
    if i == j:
        raise DomainError("pair indices must differ")
    return PairParams(
        mu_i=float(spec.mu[i]),
        mu_j=float(spec.mu[j]),
        sigma_i=spec.scale_sd(i),
        sigma_j=spec.scale_sd(j),
        rho_ij=spec.rho(i, j),
    )


def pair_c(p: PairParams) -> float:
    """The pairwise constant c_ij = sqrt(1 - rho^2 + (sigma_j/sigma_i - rho)^2)."""
    ratio = p.sigma_j / p.sigma_i
    return math.sqrt(max(1.0 - p.rho_ij**2 + (ratio - p.rho_ij) ** 2, 0.0))


def pair_derived(
    p: PairParams,
    family: Family,
    dof: DegreesOfFreedom | None = None,
) -> PairDerived:
    """Populate c, tau, lambda and the reliability R_ij for one pair.

    At |rho| = 1 the conditional law is degenerate: tau and lambda are
    reported as NaN, the pair is flagged and R_ij comes from the law of
    the (possibly constant) difference X_i - X_j instead of quadrature.
    """
    if family is Family.STUDENT_T and dof is None:
        raise DomainError("student-t pair requires degrees of freedom")
    c = pair_c(p)
    if abs(p.rho_ij) == 1.0:
        sd = p.diff_sd()
        if sd == 0.0:
            r = 1.0 if p.mu_i <= p.mu_j else 0.0
        else:
            from .special import std_normal_cdf, student_t_cdf

            z = (p.mu_j - p.mu_i) / sd
            r = std_normal_cdf(z) if family is Family.NORMAL else student_t_cdf(z, dof)
        return PairDerived(c, math.nan, math.nan, r, degenerate=True)

    one_minus = math.sqrt(1.0 - p.rho_ij**2)
    tau = (p.mu_j - p.mu_i) / (p.sigma_i * one_minus)
    lam = (p.sigma_j / p.sigma_i - p.rho_ij) / one_minus
    from .general_ec import reliability

    return PairDerived(c, tau, lam, reliability(p, family, dof))


# --- JSON wire format -------------------------------------------------------

_SPEC_KEYS = {"family", "nu", "mu", "sigma"}


def spec_from_dict(data: dict[str, Any]) -> DistributionSpec:
    """Parse the JSON object form of a spec; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ValidationError(["spec must be a JSON object"])
    unknown = set(data) - _SPEC_KEYS
    if unknown:
        raise ValidationError([f"unknown spec keys: {sorted(unknown)}"])
    missing = {"family", "mu", "sigma"} - set(data)
    if missing:
        raise ValidationError([f"missing spec keys: {sorted(missing)}"])
    return DistributionSpec(
        family=data["family"],
        mu=data["mu"],
        sigma_mat=data["sigma"],
        nu=data.get("nu"),
    )


def spec_from_json(text: str) -> DistributionSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError([f"malformed JSON: {exc}"]) from exc
    return spec_from_dict(data)


def spec_to_dict(spec: ValidatedSpec) -> dict[str, Any]:
    out: dict[str, Any] = {
        "family": spec.family.value,
        "mu": [float(v) for v in spec.mu],
        "sigma": [[float(v) for v in row] for row in spec.sigma_mat],
    }
    if spec.dof is not None:
        out["nu"] = spec.dof.nu
    return out
