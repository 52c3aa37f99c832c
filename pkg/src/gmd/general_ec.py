"""GMD through conditional CDFs and numerical integration.

For any absolutely continuous pair, E|X_i - X_j| can be assembled from
stress-strength reliabilities R_ij = P(X_i <= X_j) and the means of the
tilted densities h_ij(x) = f_{X_j}(x) pi_ij(x) / R_ij, where
pi_ij(x) = F_{X_i | X_j = x}(x) is the conditional CDF evaluated on the
diagonal:

    E|X_i - X_j| = 2 R_ji mu_H_ji + 2 R_ij mu_H_ij - mu_i - mu_j.

Everything here is evaluated by adaptive quadrature, which makes this
module the numerical cross-check for every closed form in
``closed_form``.  Only the normal and Student-t conditional laws ship;
the machinery takes the skewing function as data, so further families
plug in without structural change.

Pairs with |rho| = 1 have a degenerate conditional law and are rejected
here; the closed-form module owns the degenerate-pair convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special as sp

from .errors import DegeneratePairError, DomainError, NonconvergenceError
from .model import (
    Family,
    GmdMethod,
    GmdResult,
    PairParams,
    ValidatedSpec,
    pair_params,
)
from .quadrature import (
    QuadratureConfig,
    QuadratureResult,
    integrate_half_line_below,
    integrate_real_line,
    integrate_real_line_split,
)
from .special import DegreesOfFreedom

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Array-valued twins of the scalar functions in ``special``; quadrature
# evaluates whole node batches at once.


def _phi(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def _t_pdf(x: np.ndarray, nu: float) -> np.ndarray:
    log_norm = sp.gammaln((nu + 1.0) / 2.0) - sp.gammaln(nu / 2.0) - 0.5 * math.log(nu * math.pi)
    # x*x may overflow to inf for extreme abscissae; the density is then a
    # clean zero, so the overflow is expected rather than an error.
    with np.errstate(over="ignore"):
        return np.exp(log_norm - 0.5 * (nu + 1.0) * np.log1p(x * x / nu))


def _t_cdf(x: np.ndarray, nu: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    tail = 0.5 * sp.betainc(nu / 2.0, 0.5, nu / (nu + x * x))
    return np.where(x < 0, tail, 1.0 - tail)


def _marginal_pdf(x: np.ndarray, mu: float, sigma: float, family: Family,
                  dof: DegreesOfFreedom | None) -> np.ndarray:
    z = (np.asarray(x, dtype=float) - mu) / sigma
    if family is Family.NORMAL:
        return _phi(z) / sigma
    assert dof is not None
    return _t_pdf(z, dof.nu) / sigma


def _marginal_cdf(x: np.ndarray, mu: float, sigma: float, family: Family,
                  dof: DegreesOfFreedom | None) -> np.ndarray:
    z = (np.asarray(x, dtype=float) - mu) / sigma
    if family is Family.NORMAL:
        return sp.ndtr(z)
    assert dof is not None
    return _t_cdf(z, dof.nu)


@dataclass(frozen=True)
class SkewingFunction:
    """The conditional CDF x -> F_{X_i | X_j = x}(x) for one oriented pair.

    Values lie in [0, 1]; when the pair is exchangeable and centered the
    map satisfies pi(-x) = 1 - pi(x).  ``skew_density`` is the associated
    (generally skew-symmetric) density 2 f_{X_j}(x) pi(x).
    """

    eval: Callable[[np.ndarray], np.ndarray]
    family: Family
    params: PairParams
    dof: DegreesOfFreedom | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.eval(np.asarray(x, dtype=float))

    def skew_density(self, x: np.ndarray) -> np.ndarray:
        p = self.params
        return 2.0 * _marginal_pdf(x, p.mu_j, p.sigma_j, self.family, self.dof) * self(x)

    def skew_cdf(self, x: float, config: QuadratureConfig | None = None) -> float:
        res = integrate_half_line_below(
            self.skew_density, x, config, scale=self.params.sigma_j
        )
        return min(1.0, max(0.0, res.value))


def _require_nondegenerate(p: PairParams) -> None:
    if abs(p.rho_ij) == 1.0:
        raise DegeneratePairError(
            f"conditional law is degenerate at rho = {p.rho_ij}"
        )


def skewing_normal(p: PairParams) -> SkewingFunction:
    """Conditional-CDF skewing function of a jointly normal pair."""
    _require_nondegenerate(p)
    root = math.sqrt(1.0 - p.rho_ij**2)

    def eval_(x: np.ndarray) -> np.ndarray:
        arg = ((x - p.mu_i) / p.sigma_i - p.rho_ij * (x - p.mu_j) / p.sigma_j) / root
        return sp.ndtr(arg)

    return SkewingFunction(eval_, Family.NORMAL, p)


def skewing_student(p: PairParams, dof: DegreesOfFreedom) -> SkewingFunction:
    """Conditional-CDF skewing function of a Student-t pair.

    The conditional law of X_i given X_j = x is t with nu+1 degrees of
    freedom and squared scale inflated by (nu + z_j^2)/(nu + 1), which is
    where the argument's z-dependent prefactor comes from.
    """
    _require_nondegenerate(p)
    nu = dof.nu
    one_minus = 1.0 - p.rho_ij**2

    def eval_(x: np.ndarray) -> np.ndarray:
        zj = (x - p.mu_j) / p.sigma_j
        # zj*zj may overflow at extreme abscissae; the prefactor is then a
        # clean zero and the argument collapses to the centered value.
        with np.errstate(over="ignore"):
            pref = np.sqrt((nu + 1.0) / one_minus / (nu + zj * zj))
        return _t_cdf(pref * ((x - p.mu_i) / p.sigma_i - p.rho_ij * zj), nu + 1.0)

    return SkewingFunction(eval_, Family.STUDENT_T, p, dof)


def _skewing(p: PairParams, family: Family, dof: DegreesOfFreedom | None) -> SkewingFunction:
    if family is Family.NORMAL:
        return skewing_normal(p)
    if dof is None:
        raise DomainError("student-t pair requires degrees of freedom")
    return skewing_student(p, dof)


def _skew_transition(p: PairParams) -> list[tuple[float, float]]:
    """Location and width of the conditional-CDF transition.

    When the pair scales are badly mismatched this transition is far
    narrower than the marginal density and needs explicit panel edges; a
    zero slope means the skewing argument never crosses zero.
    """
    slope = 1.0 / p.sigma_i - p.rho_ij / p.sigma_j
    if slope == 0.0:
        return []
    x_star = (p.mu_i / p.sigma_i - p.rho_ij * p.mu_j / p.sigma_j) / slope
    width = math.sqrt(1.0 - p.rho_ij**2) / abs(slope)
    return [(x_star, width)]


def reliability_quadrature(
    p: PairParams,
    family: Family,
    dof: DegreesOfFreedom | None = None,
    config: QuadratureConfig | None = None,
) -> QuadratureResult:
    """R_ij = E[pi_ij(X_j)] by quadrature; the checked slow path."""
    skew = _skewing(p, family, dof)

    def integrand(x: np.ndarray) -> np.ndarray:
        return _marginal_pdf(x, p.mu_j, p.sigma_j, family, dof) * skew(x)

    return integrate_real_line(integrand, config, center=p.mu_j, scale=p.sigma_j,
                               features=_skew_transition(p))


def reliability(
    p: PairParams,
    family: Family,
    dof: DegreesOfFreedom | None = None,
    config: QuadratureConfig | None = None,
) -> float:
    """Stress-strength reliability P(X_i <= X_j).

    The normal family takes the analytic fast path through the CDF of the
    difference; the Student-t family integrates.
    """
    _require_nondegenerate(p)
    if family is Family.NORMAL:
        return float(sp.ndtr((p.mu_j - p.mu_i) / p.diff_sd()))
    return reliability_quadrature(p, family, dof, config).value


def h_density(
    p: PairParams,
    family: Family,
    x: np.ndarray,
    dof: DegreesOfFreedom | None = None,
    r_ij: float | None = None,
) -> np.ndarray:
    """The tilted density h_ij(x) = f_{X_j}(x) pi_ij(x) / R_ij."""
    skew = _skewing(p, family, dof)
    if r_ij is None:
        r_ij = reliability(p, family, dof)
    if r_ij <= 0.0:
        raise DomainError("R_ij = 0: the ordering X_i <= X_j has no mass")
    return _marginal_pdf(x, p.mu_j, p.sigma_j, family, dof) * skew(x) / r_ij


def max_pdf(
    p: PairParams,
    family: Family,
    x: np.ndarray,
    dof: DegreesOfFreedom | None = None,
) -> np.ndarray:
    """Density of max(X_i, X_j): f_i pi_ji + f_j pi_ij."""
    skew_ij = _skewing(p, family, dof)
    skew_ji = _skewing(p.swapped(), family, dof)
    return (
        _marginal_pdf(x, p.mu_i, p.sigma_i, family, dof) * skew_ji(x)
        + _marginal_pdf(x, p.mu_j, p.sigma_j, family, dof) * skew_ij(x)
    )


def min_pdf(
    p: PairParams,
    family: Family,
    x: np.ndarray,
    dof: DegreesOfFreedom | None = None,
) -> np.ndarray:
    """Density of min(X_i, X_j): f_i (1 - pi_ji) + f_j (1 - pi_ij).

    Built from the complementary skewing functions, so that the pointwise
    identity min density = f_i + f_j - max density is a real consistency
    check rather than a restatement.
    """
    skew_ij = _skewing(p, family, dof)
    skew_ji = _skewing(p.swapped(), family, dof)
    return (
        _marginal_pdf(x, p.mu_i, p.sigma_i, family, dof) * (1.0 - skew_ji(x))
        + _marginal_pdf(x, p.mu_j, p.sigma_j, family, dof) * (1.0 - skew_ij(x))
    )


def _first_moment_integral(
    weight: Callable[[np.ndarray], np.ndarray],
    center: float,
    scale: float,
    family: Family,
    dof: DegreesOfFreedom | None,
    config: QuadratureConfig | None,
    features: Sequence[tuple[float, float]] = (),
) -> QuadratureResult:
    """Integral of x * weight(x); split-and-extrapolate for heavy t tails.

    With nu in (1, 2] the integrand decays like |x|^{-nu}, too slowly for
    the tangent substitution to resolve at tight tolerances, so the
    domain is split at +/- 10 scale units and the tails extrapolated.
    """

    def integrand(x: np.ndarray) -> np.ndarray:
        return x * weight(x)

    if family is Family.STUDENT_T and dof is not None and dof.nu <= 2.0:
        return integrate_real_line_split(integrand, config, center=center,
                                         scale=scale, split=10.0,
                                         features=features)
    return integrate_real_line(integrand, config, center=center, scale=scale,
                               features=features)


def _mu_h(
    p: PairParams,
    family: Family,
    dof: DegreesOfFreedom | None,
    config: QuadratureConfig | None,
    r_ij: float | None = None,
) -> tuple[float, QuadratureResult]:
    if family is Family.STUDENT_T:
        assert dof is not None
        dof.require_mean()
    skew = _skewing(p, family, dof)
    if r_ij is None:
        r_ij = reliability(p, family, dof, config)
    if r_ij <= 0.0:
        raise DomainError("R_ij = 0: mean of h_ij is undefined")

    def weight(x: np.ndarray) -> np.ndarray:
        return _marginal_pdf(x, p.mu_j, p.sigma_j, family, dof) * skew(x)

    res = _first_moment_integral(weight, p.mu_j, p.sigma_j, family, dof, config,
                                 features=_skew_transition(p))
    return res.value / r_ij, res


def mu_H(
    p: PairParams,
    family: Family,
    dof: DegreesOfFreedom | None = None,
    config: QuadratureConfig | None = None,
) -> float:
    """Mean of the tilted density h_ij, by direct quadrature."""
    value, _ = _mu_h(p, family, dof, config)
    return value


def gmd_quadrature(spec: ValidatedSpec, config: QuadratureConfig | None = None) -> GmdResult:
    """GMD assembled from reliabilities and tilted-density means.

    Agrees with the closed forms to quadrature accuracy; diagnostics carry
    the accumulated per-pair quadrature error estimates.
    """
    if spec.family is Family.STUDENT_T:
        assert spec.dof is not None
        spec.dof.require_mean()
    contributions = []
    total_err = 0.0
    total_sub = 0

    def rel(p: PairParams) -> tuple[float, int]:
        if spec.family is Family.NORMAL:
            return reliability(p, spec.family), 0
        res = reliability_quadrature(p, spec.family, spec.dof, config)
        return res.value, res.subdivisions

    def oriented_moment(p: PairParams) -> tuple[float, float, int]:
        """r_ij * mu_H_ij with its error estimate and subdivision count.

        An ordering whose probability underflows to zero carries no
        representable mass, so its moment contribution is exactly zero and
        the tilted mean never needs to be formed.
        """
        r, sub_r = rel(p)
        if r <= 0.0:
            return 0.0, 0.0, sub_r
        mu, res = _mu_h(p, spec.family, spec.dof, config, r)
        # r * mu_H collapses back to the raw first-moment integral, so the
        # reliability quadrature error cancels out of the product.
        return r * mu, res.error, res.subdivisions + sub_r

    for i, j in spec.pairs():
        p = pair_params(spec, i, j)
        q = p.swapped()
        try:
            moment_ij, err_ij, sub_ij = oriented_moment(p)
            moment_ji, err_ji, sub_ji = oriented_moment(q)
        except NonconvergenceError as exc:
            raise NonconvergenceError(f"pair ({i},{j}): {exc}") from exc
        term = 2.0 * moment_ji + 2.0 * moment_ij - p.mu_i - p.mu_j
        contributions.append(((i, j), term))
        total_err += 2.0 * (err_ij + err_ji)
        total_sub += sub_ij + sub_ji
    result = GmdResult.from_pairs(GmdMethod.QUADRATURE, contributions)
    result.diagnostics["abs_error_estimate"] = total_err / len(contributions)
    result.diagnostics["quadrature_subdivisions"] = float(total_sub)
    return result


def marginal_product_density(
    p: PairParams,
    family: Family,
    dof: DegreesOfFreedom | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """The density 2 f_{X_i}(x) F_{X_j}(x) built from the marginals alone.

    This equals the skew density of the pair exactly when the coordinates
    are independent; it is the classical order-statistic construction for
    i.i.d. variables.
    """

    def density(x: np.ndarray) -> np.ndarray:
        return (
            2.0
            * _marginal_pdf(x, p.mu_i, p.sigma_i, family, dof)
            * _marginal_cdf(x, p.mu_j, p.sigma_j, family, dof)
        )

    return density


def _is_pairwise_exchangeable(spec: ValidatedSpec, rtol: float = 1e-12) -> bool:
    mus = np.asarray(spec.mu)
    sds = np.array([spec.scale_sd(k) for k in range(spec.n)])
    mu_scale = max(float(np.max(np.abs(mus))), 1.0)
    sd_scale = float(np.max(sds))
    return (
        float(np.max(mus) - np.min(mus)) <= rtol * mu_scale
        and float(np.max(sds) - np.min(sds)) <= rtol * sd_scale
    )


def gmd_exchangeable_skew(spec: ValidatedSpec, config: QuadratureConfig | None = None) -> float:
    """GMD of an exchangeable spec through skew-symmetric pair means.

    Each pair of an exchangeable vector has max-density 2 f(x) pi(x); after
    centering, the pair's contribution is twice the mean of that density.
    Under independence the skewing function collapses to the marginal CDF
    and this is the classical 2 f F construction.
    """
    if not _is_pairwise_exchangeable(spec):
        raise DomainError(
            "gmd_exchangeable_skew requires equal means and equal scales"
        )
    if spec.family is Family.STUDENT_T:
        assert spec.dof is not None
        spec.dof.require_mean()
    sigma1 = spec.scale_sd(0)
    total = 0.0
    pairs = spec.pairs()
    for i, j in pairs:
        p = pair_params(spec, i, j)
        centered = PairParams(0.0, 0.0, sigma1, sigma1, p.rho_ij)
        skew = _skewing(centered, spec.family, spec.dof)
        res = _first_moment_integral(
            skew.skew_density, 0.0, sigma1, spec.family, spec.dof, config
        )
        total += res.value
    return 2.0 * total / len(pairs)
