"""Exact Wasserstein distances between discrete measures under the maximum norm.

The transportation problem is solved by the network simplex of POT. Every
solve is certified: the solver must report optimality, and the returned
dual potentials must close the duality gap and satisfy complementary
slackness, otherwise ``CertificateViolation`` is raised.
"""

import math
from dataclasses import dataclass
from logging import getLogger

import numpy as np
import ot

from uniquant.core.decomposition import UniformDecomposition
from uniquant.core.measure import DiscreteMeasure
from uniquant.core.quantization import Quantizer
from uniquant.errors import (
    CertificateViolation,
    EmptyMeasure,
    FormatError,
    InvalidParameter,
    ProblemTooLarge,
    UnbalancedMasses,
)
from uniquant.typedefs import Coords, FloatArray, IntArray, JsonDict

logger = getLogger(__name__)

MASS_BALANCE_TOL = 1e-9
DUALITY_GAP_TOL = 1e-7
PLAN_TOL = 1e-12
MAX_PROBLEM_SIZE = 10**6
MAX_SIMPLEX_ITERATIONS = 10_000_000

OPTIMAL = 1  # POT result code of a solved problem


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Sparse optimal coupling.

    Attributes:
        sources, targets: 0-based atom indices into the two measures
        masses: transported mass of every entry, nonnegative
        cost: sum of mass * ||x_i - y_j||^p
        p: the order

    """

    sources: IntArray
    targets: IntArray
    masses: FloatArray
    cost: float
    p: float

    @property
    def value(self) -> float:
        return self.cost ** (1 / self.p)

    def dense(self, n_sources: int, n_targets: int) -> FloatArray:
        plan = np.zeros((n_sources, n_targets))
        np.add.at(plan, (self.sources, self.targets), self.masses)
        return plan

    def marginal_errors(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[float, float]:
        """Largest deviation of the row and column sums from the two marginals."""
        rows = np.bincount(self.sources, weights=self.masses, minlength=len(mu))
        cols = np.bincount(self.targets, weights=self.masses, minlength=len(nu))
        nu_weights = nu.weights * (mu.mass / nu.mass) if nu.mass > 0 else nu.weights
        return (
            float(np.max(np.abs(rows - mu.weights), initial=0.0)),
            float(np.max(np.abs(cols - nu_weights), initial=0.0)),
        )

    def to_dict(self) -> JsonDict:
        return {
            "p": self.p,
            "value": self.value,
            "entries": [
                {"i": int(i), "j": int(j), "m": float(m)}
                for i, j, m in zip(self.sources, self.targets, self.masses, strict=True)
            ],
        }


def ground_cost(x: Coords, y: Coords, p: float) -> FloatArray:
    """Cost matrix ||x_i - y_j||_inf^p."""
    diff = np.abs(x[:, np.newaxis, :] - y[np.newaxis, :, :])
    return diff.max(axis=2) ** p


def _check_pair(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float, *, normalize: bool) -> DiscreteMeasure:
    """Validate a transport problem and return nu rescaled to the mass of mu."""
    if not p >= 1:
        msg = f"Order p must be at least 1, got {p}"
        raise InvalidParameter(msg)
    if mu.dim != nu.dim:
        msg = f"Measures live in different dimensions ({mu.dim} and {nu.dim})"
        raise FormatError(msg)
    if mu.mass <= 0 or nu.mass <= 0:
        msg = "Transport needs two measures of positive mass"
        raise EmptyMeasure(msg)
    if not normalize and abs(mu.mass - nu.mass) > MASS_BALANCE_TOL:
        msg = f"Masses differ: {mu.mass!r} and {nu.mass!r}"
        raise UnbalancedMasses(msg)
    return nu.with_weights(nu.weights * (mu.mass / nu.mass))


def _certify(a: FloatArray, b: FloatArray, cost_matrix: FloatArray, plan: FloatArray, log: JsonDict) -> float:
    """Check optimality of a POT solution through its dual potentials."""
    if log["result_code"] != OPTIMAL:
        msg = f"Network simplex did not reach optimality: {log['warning']}"
        raise CertificateViolation(msg)
    u = np.asarray(log["u"], dtype=np.float64)
    v = np.asarray(log["v"], dtype=np.float64)
    primal = math.fsum((plan * cost_matrix).ravel().tolist())
    dual = math.fsum((a * u).tolist()) + math.fsum((b * v).tolist())
    if abs(primal - dual) > DUALITY_GAP_TOL * max(1.0, abs(primal)):
        msg = f"Duality gap {abs(primal - dual)!r} (primal {primal!r}, dual {dual!r})"
        raise CertificateViolation(msg)
    tol = DUALITY_GAP_TOL * max(1.0, float(cost_matrix.max()))
    reduced = cost_matrix - u[:, np.newaxis] - v[np.newaxis, :]
    if reduced.min() < -tol:
        msg = f"Dual potentials infeasible by {-reduced.min()!r}"
        raise CertificateViolation(msg)
    if np.any(np.abs(reduced[plan > PLAN_TOL]) > tol):
        msg = "Complementary slackness fails on the optimal plan"
        raise CertificateViolation(msg)
    return primal


def exact_wasserstein(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    p: float,
    *,
    normalize: bool = False,
) -> tuple[float, TransportPlan]:
    """W_p(mu, nu) under the maximum norm and a certified optimal plan.

    With ``normalize`` the masses of nu are rescaled to the mass of mu instead
    of requiring them to agree within 1e-9.

    Raises:
        UnbalancedMasses: if the masses differ and ``normalize`` is off
        ProblemTooLarge: if the product of the support sizes exceeds 10^6
        CertificateViolation: if optimality cannot be certified

    """
    nu = _check_pair(mu, nu, p, normalize=normalize)
    src = np.flatnonzero(mu.support_mask)
    dst = np.flatnonzero(nu.support_mask)
    size = src.shape[0] * dst.shape[0]
    if size > MAX_PROBLEM_SIZE:
        msg = f"Transport problem with {src.shape[0]} x {dst.shape[0]} atoms exceeds {MAX_PROBLEM_SIZE}"
        raise ProblemTooLarge(msg)

    a = np.ascontiguousarray(mu.weights[src])
    b = np.ascontiguousarray(nu.weights[dst])
    b = b * (math.fsum(a.tolist()) / math.fsum(b.tolist()))
    cost_matrix = np.ascontiguousarray(ground_cost(mu.points[src], nu.points[dst], p))
    plan, log = ot.emd(a, b, cost_matrix, numItermax=MAX_SIMPLEX_ITERATIONS, log=True)
    plan = np.maximum(np.asarray(plan, dtype=np.float64), 0.0)
    cost = max(_certify(a, b, cost_matrix, plan, log), 0.0)

    rows, cols = np.nonzero(plan > 0)
    transport = TransportPlan(
        sources=src[rows].astype(np.int64),
        targets=dst[cols].astype(np.int64),
        masses=plan[rows, cols],
        cost=cost,
        p=p,
    )
    logger.debug(f"W_{p:g} on {src.shape[0]} x {dst.shape[0]} atoms: {transport.value:.6g}")
    return transport.value, transport


def wasserstein_1d(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float, *, normalize: bool = False) -> float:
    """W_p on the line through the quantile coupling, optimal for every p >= 1.

    Both cumulative distribution functions are merged into one list of
    breakpoints; on each interval between consecutive breakpoints the two
    quantile functions are constant.
    """
    nu = _check_pair(mu, nu, p, normalize=normalize)
    if mu.dim != 1:
        msg = f"wasserstein_1d needs measures on the line, got d={mu.dim}"
        raise FormatError(msg)
    mu, nu = mu.positive_part(), nu.positive_part()
    x_order = np.argsort(mu.points[:, 0], kind="stable")
    y_order = np.argsort(nu.points[:, 0], kind="stable")
    x = mu.points[x_order, 0]
    y = nu.points[y_order, 0]
    cum_x = np.cumsum(mu.weights[x_order])
    cum_y = np.cumsum(nu.weights[y_order])
    cum_x[-1] = cum_y[-1] = mu.mass
    breaks = np.union1d(cum_x, cum_y)
    widths = np.diff(breaks, prepend=0.0)
    i = np.minimum(np.searchsorted(cum_x, breaks, side="left"), x.shape[0] - 1)
    j = np.minimum(np.searchsorted(cum_y, breaks, side="left"), y.shape[0] - 1)
    cost = math.fsum((widths * np.abs(x[i] - y[j]) ** p).tolist())
    return cost ** (1 / p)


def wasserstein(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float, *, normalize: bool = False) -> float:
    """Exact W_p, by the quantile coupling on the line and network simplex otherwise."""
    if mu.dim == 1 and nu.dim == 1:
        return wasserstein_1d(mu, nu, p, normalize=normalize)
    value, _ = exact_wasserstein(mu, nu, p, normalize=normalize)
    return value


def coupling_cost(dec: UniformDecomposition, quantizer: Quantizer, p: float) -> float:
    """Cost of the canonical coupling sending piece k entirely to center k.

    Returns (sum_k int ||x - x_k||^p rho_k(dx))^(1/p).
    """
    centers = quantizer.centers
    terms: list[float] = []
    for piece, center in zip(dec.pieces, centers, strict=True):
        distances = np.abs(piece.piece.points - center).max(axis=1)
        terms.extend((piece.piece.weights * distances**p).tolist())
    return math.fsum(terms) ** (1 / p)
