"""Upper bounds on the Gini mean difference from mean/variance/correlation.

All bounds here require finite second moments.  For the Student-t family
the scale entries of the spec are inflated by sqrt(nu/(nu-2)) to obtain
standard deviations before any bound is formed; with nu <= 2 the bounds
simply do not exist and the report marks them inapplicable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DomainError, MomentExistenceError
from .model import Family, PairParams, ValidatedSpec, pair_params
from .special import lp_norm_std_normal


@dataclass
class BoundReport:
    """Every applicable bound for one spec, with optional exact value.

    Fields are None when the corresponding bound's assumptions do not hold
    for the spec (noted in ``notes``).
    """

    second_moment: float | None
    sqrt_one_minus_rho: float | None
    gmd2_sqrt2: float | None
    cp: tuple[float, float] | None  # (p, bound value)
    exact_gmd: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "second_moment": self.second_moment,
            "sqrt_one_minus_rho": self.sqrt_one_minus_rho,
            "gmd2_sqrt2": self.gmd2_sqrt2,
            "cp": None if self.cp is None else {"p": self.cp[0], "value": self.cp[1]},
            "exact_gmd": self.exact_gmd,
            "notes": list(self.notes),
        }


def second_moment_pair_bound(p: PairParams) -> float:
    """sqrt((sigma_i - sigma_j*rho)^2 + sigma_j^2 (1 - rho^2)) + |mu_i - mu_j|.

    The radicand equals Var(X_i - X_j) when the sigma fields are standard
    deviations, so the bound is symmetric in (i, j) and never needs a
    division; rho = +/-1 is fine.
    """
    radicand = (p.sigma_i - p.sigma_j * p.rho_ij) ** 2 + p.sigma_j**2 * (
        1.0 - p.rho_ij**2
    )
    return math.sqrt(max(radicand, 0.0)) + abs(p.mu_i - p.mu_j)


def _sd_factor(spec: ValidatedSpec) -> float:
    """Scale-to-standard-deviation factor; requires finite variance."""
    if spec.family is Family.STUDENT_T:
        assert spec.dof is not None
        spec.dof.require_variance()
        return math.sqrt(spec.dof.nu / (spec.dof.nu - 2.0))
    return 1.0


def second_moment_bound(spec: ValidatedSpec) -> float:
    """Average of the pairwise second-moment bounds over all pairs."""
    factor = _sd_factor(spec)
    total = 0.0
    pairs = spec.pairs()
    for i, j in pairs:
        p = pair_params(spec, i, j)
        p_sd = PairParams(p.mu_i, p.mu_j, factor * p.sigma_i, factor * p.sigma_j, p.rho_ij)
        total += second_moment_pair_bound(p_sd)
    return total / len(pairs)


def exchangeable_rho_bound(sigma1: float, rhos: Sequence[float]) -> float:
    """sqrt(2)*sigma1 times the pair average of sqrt(1 - rho).

    Valid for vectors with common mean and common standard deviation
    sigma1.  sqrt(1 - rho) is taken as 0 at rho = 1.
    """
    if sigma1 <= 0:
        raise DomainError(f"sigma1 must be > 0, got {sigma1}")
    rhos = list(rhos)
    if not rhos:
        raise DomainError("empty pair correlation list")
    if any(abs(r) > 1.0 for r in rhos):
        raise DomainError("correlations must lie in [-1, 1]")
    avg = sum(math.sqrt(max(1.0 - r, 0.0)) for r in rhos) / len(rhos)
    return math.sqrt(2.0) * sigma1 * avg


def cp_constant(
    p: float,
    lp_norm: Callable[[float], float] = lp_norm_std_normal,
) -> float:
    """C_p = 2 ||Z||_p ((p-1)/(2p-1))^((p-1)/p) for the given L^p-norm provider.

    The shipped provider is the standard normal; other laws plug in
    through ``lp_norm`` without an API change.
    """
    if p <= 1:
        raise DomainError(f"cp_constant requires p > 1, got {p}")
    return 2.0 * lp_norm(p) * ((p - 1.0) / (2.0 * p - 1.0)) ** ((p - 1.0) / p)


def cp_bound(p: float, sigma1: float) -> float:
    """C_p * sigma1; the caller asserts the i.i.d. assumption."""
    if sigma1 <= 0:
        raise DomainError(f"sigma1 must be > 0, got {sigma1}")
    return cp_constant(p) * sigma1


def cp_grid_minimum(
    lo: float = 1.0 + 1e-6,
    hi: float = 2.0,
    num: int = 2001,
    lp_norm: Callable[[float], float] = lp_norm_std_normal,
) -> tuple[float, float]:
    """Smallest C_p on a grid of p values in (1, 2]; returns (p, C_p).

    No analytic optimum is claimed; this is the advertised grid search.
    """
    if not (1.0 < lo < hi):
        raise DomainError("grid requires 1 < lo < hi")
    grid = np.linspace(lo, hi, num)
    values = [cp_constant(float(p), lp_norm) for p in grid]
    k = int(np.argmin(values))
    return float(grid[k]), float(values[k])


def _equal_within(values: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = max(float(np.max(np.abs(values))), 1.0)
    return float(np.max(values) - np.min(values)) <= rtol * scale


def build_bound_report(
    spec: ValidatedSpec,
    exact_gmd: float | None = None,
    cp_p: float = 2.0,
) -> BoundReport:
    """Assemble every bound whose assumptions the spec satisfies."""
    notes: list[str] = []
    sds = np.array([spec.scale_sd(k) for k in range(spec.n)])
    rhos = [spec.rho(i, j) for i, j in spec.pairs()]
    equal_sigma = _equal_within(sds)
    equal_mu = _equal_within(np.asarray(spec.mu))

    try:
        factor = _sd_factor(spec)
    except MomentExistenceError:
        notes.append("variance does not exist (nu <= 2): all bounds inapplicable")
        return BoundReport(None, None, None, None, exact_gmd, notes)

    second_moment = second_moment_bound(spec)

    sqrt_bound = None
    if equal_sigma and equal_mu:
        sqrt_bound = exchangeable_rho_bound(factor * float(sds[0]), rhos)
    else:
        notes.append("sqrt(1-rho) bound needs common mean and variance")

    gmd2 = None
    if spec.n == 2 and equal_sigma and equal_mu and abs(rhos[0]) <= 1e-12:
        gmd2 = math.sqrt(2.0) * factor * float(sds[0])

    cp = None
    if (
        spec.family is Family.NORMAL
        and equal_sigma
        and equal_mu
        and all(abs(r) <= 1e-12 for r in rhos)
    ):
        cp = (cp_p, cp_bound(cp_p, float(sds[0])))
    else:
        notes.append("C_p bound needs i.i.d. normal coordinates")

    return BoundReport(second_moment, sqrt_bound, gmd2, cp, exact_gmd, notes)
