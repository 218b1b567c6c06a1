"""Deterministic empirical quantization with certified Wasserstein bounds.

The quantizer places one center at the middle of every cube of the uniform
decomposition. The canonical coupling (send piece rho_k to center x_k) gives

    W_p(mu_n, rho)^p <= n^-1 sum_k Diam(A_k)^p <= (4r)^p n^-1 sum_k k^(-p/d),

and the last sum is bounded by the three-regime rate function f_{p,d}(n).
"""

import math
from dataclasses import dataclass, field
from enum import StrEnum
from logging import getLogger

import numpy as np

from uniquant.core.decomposition import UniformDecomposition, decompose
from uniquant.core.measure import DiscreteMeasure, bounding_radius, truncate
from uniquant.errors import DivergentSeries, InvalidOrder, InvalidParameter
from uniquant.typedefs import Coords, JsonDict

logger = getLogger(__name__)

ZETA_TOL = 1e-12


class Regime(StrEnum):
    SUB = "sub"  # p < d
    CRITICAL = "critical"  # p = d
    SUPER = "super"  # p > d


@dataclass(frozen=True)
class RateRegime:
    p: float
    d: int

    @property
    def regime(self) -> Regime:
        if self.p < self.d:
            return Regime.SUB
        if self.p == self.d:
            return Regime.CRITICAL
        return Regime.SUPER


def _check_order(p: float, d: int, n: int) -> None:
    if not p >= 1:
        msg = f"Order p must be at least 1, got {p}"
        raise InvalidParameter(msg)
    if d < 1:
        msg = f"Dimension d must be at least 1, got {d}"
        raise InvalidParameter(msg)
    if n < 1:
        msg = f"n must be a positive integer, got {n}"
        raise InvalidParameter(msg)


# Zeta function


@dataclass(frozen=True)
class ZetaBracket:
    """Rigorous enclosure lower <= zeta(s) <= upper."""

    s: float
    lower: float
    upper: float
    terms: int

    @property
    def value(self) -> float:
        return (self.lower + self.upper) / 2

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _tail_width(s: float, k: int) -> float:
    # First omitted Euler-Maclaurin term (B_6) of sum_{j >= k} j^-s.
    return s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * k ** (-s - 5) / 30240


def zeta_bracket(s: float, tolerance: float = ZETA_TOL) -> ZetaBracket:
    """Enclose zeta(s) = sum_{k >= 1} k^-s between two certified values.

    The partial sum over k < K is exact up to rounding. The tail sum_{k >= K}
    is the integral K^(1-s)/(s-1) corrected by Euler-Maclaurin terms through
    B_4; for the completely monotone summand the remainder lies between 0 and
    the B_6 term, which is the bracket width. K doubles until the width drops
    below ``tolerance``.

    Raises:
        DivergentSeries: if s <= 1

    """
    if not s > 1:
        msg = f"zeta(s) diverges for s = {s} <= 1"
        raise DivergentSeries(msg)
    k = 8
    while _tail_width(s, k) >= tolerance:
        k *= 2
    head = math.fsum(j ** (-s) for j in range(1, k))
    tail = (
        k ** (1 - s) / (s - 1)
        + k ** (-s) / 2
        + s * k ** (-s - 1) / 12
        - s * (s + 1) * (s + 2) * k ** (-s - 3) / 720
    )
    lower = head + tail
    return ZetaBracket(s=s, lower=lower, upper=lower + _tail_width(s, k), terms=k - 1)


def zeta(s: float) -> float:
    """Riemann zeta function for real s > 1, midpoint of :func:`zeta_bracket`."""
    return zeta_bracket(s).value


# Rate functions


def rate_bound(p: float, d: int, n: int) -> float:
    """Rate function f_{p,d}(n).

    p < d: (d / (d - p))^(1/p) n^(-1/d)
    p = d: ((1 + ln n) / n)^(1/d)
    p > d: zeta(p/d) n^(-1/p)
    """
    _check_order(p, d, n)
    match RateRegime(p, d).regime:
        case Regime.SUB:
            return (d / (d - p)) ** (1 / p) * n ** (-1 / d)
        case Regime.CRITICAL:
            return ((1 + math.log(n)) / n) ** (1 / d)
        case Regime.SUPER:
            return zeta(p / d) * n ** (-1 / p)


def closed_form_chain_bound(n: int, r: float, p: float, d: int) -> float:
    """((4r)^p n^-1 sum_{k <= n} k^(-p/d))^(1/p), the middle of the certified chain."""
    _check_order(p, d, n)
    k = np.arange(1, n + 1, dtype=np.float64)
    return 4 * r * (math.fsum((k ** (-p / d)).tolist()) / n) ** (1 / p)


def coupling_upper_bound(dec: UniformDecomposition, p: float) -> float:
    """(n^-1 sum_k Diam(A_k)^p)^(1/p) over the constructed cubes."""
    _check_order(p, dec.d, dec.n)
    return (math.fsum((dec.diameters() ** p).tolist()) / dec.n) ** (1 / p)


# Truncation for unbounded supports


def tail_moment(rho: DiscreteMeasure, r: float, q: float) -> float:
    """C_q(r), the q-th moment of rho outside B_r."""
    norms = rho.max_norms()
    outside = norms > r
    return math.fsum((rho.weights[outside] * norms[outside] ** q).tolist())


def truncation_cost(rho: DiscreteMeasure, r: float, p: float) -> float:
    """(int_{||x|| > r} ||x||^p rho(dx))^(1/p), which bounds W_p(rho, truncate(rho, r))."""
    return tail_moment(rho, r, p) ** (1 / p)


@dataclass(frozen=True)
class TruncationSchedule:
    """Truncation level r(n) = C(r~) r~ with r~ = f_{p,d}(n)^(-p/q) and C(r) = max(C_q(r), 1/r)."""

    r_tilde: float
    tail_moment: float
    c_value: float
    radius: float


def truncation_level(rho: DiscreteMeasure, p: float, q: float, n: int) -> TruncationSchedule:
    if not q > p:
        msg = f"Moment order q must exceed p, got q={q}, p={p}"
        raise InvalidOrder(msg)
    f = rate_bound(p, rho.dim, n)
    r_tilde = f ** (-p / q)
    moment = tail_moment(rho, r_tilde, q)
    c_value = max(moment, 1 / r_tilde)
    return TruncationSchedule(r_tilde=r_tilde, tail_moment=moment, c_value=c_value, radius=c_value * r_tilde)


def truncation_schedule(rho: DiscreteMeasure, p: float, q: float, n: int) -> float:
    """Truncation radius r(n) for the unbounded-support pipeline.

    Raises:
        InvalidOrder: if q <= p

    """
    return truncation_level(rho, p, q, n).radius


# Quantizers


@dataclass(frozen=True)
class UnboundedCertificate:
    """Triangle-inequality certificate W_p(mu_n, rho) <= truncation + quantization.

    Attributes:
        p, q: transport and moment orders
        schedule: the truncation level used
        truncation_cost: canonical-coupling cost of moving the tail to the origin
        truncation_bound: the form C(r)^(1/p) r^(1 - q/p) at r = r(n)
        quantization_bound: 4 r(n) f_{p,d}(n)

    """

    p: float
    q: float
    schedule: TruncationSchedule
    truncation_cost: float
    truncation_bound: float
    quantization_bound: float

    @property
    def total(self) -> float:
        return self.truncation_cost + self.quantization_bound

    def to_dict(self) -> JsonDict:
        return {
            "p": self.p,
            "q": self.q,
            "r_tilde": self.schedule.r_tilde,
            "radius": self.schedule.radius,
            "c_value": self.schedule.c_value,
            "truncation_cost": self.truncation_cost,
            "truncation_bound": self.truncation_bound,
            "quantization_bound": self.quantization_bound,
            "certificate": self.total,
        }


@dataclass(frozen=True, eq=False)
class Quantizer:
    """Centers x_1..x_n (center k at the middle of cube A_k) and their decomposition."""

    centers: Coords
    source_decomposition: UniformDecomposition
    truncation: UnboundedCertificate | None = field(default=None)

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    def empirical_measure(self) -> DiscreteMeasure:
        """mu_n = n^-1 sum_k delta_{x_k}."""
        return DiscreteMeasure(self.centers, np.full(self.n, 1.0 / self.n))

    def certificates(self, p: float) -> JsonDict:
        dec = self.source_decomposition
        return {
            "p": p,
            "coupling_bound": coupling_upper_bound(dec, p),
            "chain_bound": closed_form_chain_bound(dec.n, dec.r, p, dec.d),
            "closed_form_bound": 4 * dec.r * rate_bound(p, dec.d, dec.n),
        }

    def to_dict(self, p: float = 1.0) -> JsonDict:
        data: JsonDict = {
            "centers": [[float(c) for c in center] for center in self.centers],
            "n": self.n,
            "certificates": self.certificates(p),
        }
        if self.truncation is not None:
            data["truncation"] = self.truncation.to_dict()
        return data


def quantize(rho: DiscreteMeasure, n: int) -> Quantizer:
    """Deterministic empirical quantizer with W_p(mu_n, rho) <= 4 r f_{p,d}(n) for all p >= 1."""
    dec = decompose(rho, n)
    centers = np.array([p.cube.center for p in dec.pieces]).reshape(n, dec.d)
    return Quantizer(centers=centers, source_decomposition=dec)


def quantize_unbounded(rho: DiscreteMeasure, n: int, p: float, q: float) -> Quantizer:
    """Quantize after truncating rho at the level r(n) of :func:`truncation_schedule`.

    The returned quantizer carries the certificate
    W_p(mu_n, rho) <= W_p(rho, rho^(r)) + 4 r(n) f_{p,d}(n).
    """
    schedule = truncation_level(rho, p, q, n)
    radius = schedule.radius
    truncated = truncate(rho, radius)
    quantizer = quantize(truncated, n)
    moment_c = max(tail_moment(rho, radius, q), 1 / radius)
    certificate = UnboundedCertificate(
        p=p,
        q=q,
        schedule=schedule,
        truncation_cost=truncation_cost(rho, radius, p),
        truncation_bound=moment_c ** (1 / p) * radius ** (1 - q / p),
        quantization_bound=4 * radius * rate_bound(p, rho.dim, n),
    )
    logger.info(
        f"Unbounded quantization n={n}: r(n)={radius:.6g} "
        f"(support radius {bounding_radius(truncated):.6g}), certificate {certificate.total:.6g}"
    )
    return Quantizer(
        centers=quantizer.centers,
        source_decomposition=quantizer.source_decomposition,
        truncation=certificate,
    )
