"""Closed-form branch-length and diversity laws for reconstructed trees.

Three conditioning scenarios appear throughout:

* given n          -- the number of extant sampled tips is fixed,
* given (n, x1)    -- tip count and the age x1 of the MRCA are both fixed,
* given x1         -- only the MRCA age is fixed.

Laws that hold for the full birth-death process take a ``Params``; laws
proven only for the pure-birth (Yule) case take a plain rate ``lam`` and
reject non-Yule ``Params``.

Mixed distributions (a continuous density on (0, x1) plus a point mass at
x1, arising because a pendant edge attached to the root has length exactly
x1) are represented by :class:`MixedDist` with an explicit ``atom_weight``,
never as numerical spikes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special, stats

from .kernel import Params, p0, p1, prob_n_given_age

__all__ = [
    "MixedDist",
    "Scenario",
    "QuadratureConfig",
    "leaf_adjacency_prob",
    "pendant_pdf_given_n",
    "pendant_cdf_given_n",
    "pendant_dist_given_n",
    "pendant_mean_given_n",
    "interior_pdf_yule",
    "interior_dist_yule",
    "speciation_kernel",
    "speciation_time_pdf",
    "speciation_time_cdf",
    "pendant_dist_given_n_age",
    "pendant_mean_given_n_age",
    "pendant_age_weight",
    "pendant_dist_given_age",
    "hypoexp_pdf",
    "hypoexp_cdf",
    "hypoexp_mean",
    "root_edge_pdf_given_n",
    "root_edge_cdf_given_n",
    "root_edge_mean_given_n",
    "root_edge_survival_given_age",
    "root_edge_mean_given_age",
    "initial_edge_survival",
    "root_edge_survival_given_n_age",
    "root_edge_limit_constant",
    "diversity_pdf_given_n",
    "diversity_cdf_given_n",
    "diversity_mean_given_n",
    "diversity_var_given_n",
    "diversity_mgf_given_n_age",
    "diversity_mean_given_n_age",
    "diversity_mean_given_age",
]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be > 0")


_DEFAULT_QUAD = QuadratureConfig()


def _quad(f, a, b, cfg: QuadratureConfig = _DEFAULT_QUAD) -> float:
    val, _ = integrate.quad(
        f, a, b,
        epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions,
    )
    return val


@dataclass(frozen=True)
class Scenario:
    """Conditioning scenario: on n, on (n, x1), or on x1 alone."""

    n: Optional[int] = None
    x1: Optional[float] = None

    def __post_init__(self):
        if self.n is None and self.x1 is None:
            raise ValueError("scenario must fix n, x1, or both")
        if self.n is not None and self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.x1 is not None and not self.x1 > 0:
            raise ValueError(f"x1 must be > 0, got {self.x1}")

    @classmethod
    def given_n(cls, n: int) -> "Scenario":
        return cls(n=n)

    @classmethod
    def given_n_age(cls, n: int, x1: float) -> "Scenario":
        return cls(n=n, x1=x1)

    @classmethod
    def given_age(cls, x1: float) -> "Scenario":
        return cls(x1=x1)


@dataclass(frozen=True)
class MixedDist:
    """A continuous density on (0, support_end) plus a point mass at the end.

    ``cdf`` is the cumulative mass of the continuous part only; it rises to
    ``1 - atom_weight`` at ``support_end``.  ``support_end`` may be +inf for
    laws without an atom.
    """

    support_end: float
    pdf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    atom_weight: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.atom_weight <= 1.0:
            raise ValueError(f"atom_weight must be in [0,1], got {self.atom_weight}")

    def total_mass(self, cfg: QuadratureConfig = _DEFAULT_QUAD) -> float:
        """Quadrature of the density plus the atom; should be 1."""
        return _quad(self.pdf, 0.0, self.support_end, cfg) + self.atom_weight

    def mean(self, cfg: QuadratureConfig = _DEFAULT_QUAD) -> float:
        m = _quad(lambda s: s * self.pdf(s), 0.0, self.support_end, cfg)
        if self.atom_weight > 0.0:
            m += self.atom_weight * self.support_end
        return m


def _yule_rate(lam: Union[float, Params]) -> float:
    """Accept a plain rate or a Params; reject Params with extinction."""
    if isinstance(lam, Params):
        if not lam.is_yule:
            raise ValueError("this law is proven for the pure-birth (mu=0) case only")
        return lam.lam
    if not lam > 0:
        raise ValueError(f"rate must be > 0, got {lam}")
    return float(lam)


# ---------------------------------------------------------------------------
# Scenario (i): conditioning on n
# ---------------------------------------------------------------------------

def leaf_adjacency_prob(k: int, n: int) -> float:
    """Probability that a random leaf is adjacent to the k-th split: 2k/(n(n-1))."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, n-1], got k={k} n={n}")
    return 2.0 * k / (n * (n - 1))


def pendant_pdf_given_n(s, p: Params):
    """Pendant-edge length density given n: 2 lam p1(s)(1 - lam p0(s)).

    The formula contains no n; the law is the same for every tip count.
    """
    return 2.0 * p.lam * p1(s, p) * (1.0 - p.lam * p0(s, p))


def pendant_cdf_given_n(s, p: Params):
    # antiderivative of p1(1-lam*p0) is p0 - lam*p0^2/2, since p0' = p1
    q = p0(s, p)
    return 2.0 * p.lam * (q - p.lam * q * q / 2.0)


def pendant_dist_given_n(p: Params) -> MixedDist:
    return MixedDist(
        support_end=math.inf,
        pdf=lambda s: pendant_pdf_given_n(s, p),
        cdf=lambda s: pendant_cdf_given_n(s, p),
    )


def pendant_mean_given_n(p: Params) -> float:
    """Expected pendant length given n: (mu + (lam-mu)log(1-mu/lam)) / mu^2.

    Evaluated through the series 1/lam * sum_{k>=2} r^{k-2}/(k(k-1)) with
    r = mu/lam when |r| is small (the closed form divides ~0 by ~0 there);
    limits: 1/(2 lam) at mu=0 and 1/lam at mu=lam.
    """
    r = p.mu / p.lam
    if abs(r) < 1e-4:
        # numerator of the closed form = sum_{k>=2} r^k / (k(k-1))
        acc = 0.0
        for k in range(2, 12):
            acc += r ** (k - 2) / (k * (k - 1))
        return acc / p.lam
    x = 1.0 - r  # = 1 - mu/lam, in (0, 2)
    if x <= 0.0:
        num = 1.0  # limit of r + (1-r)log(1-r) at r = 1
    else:
        num = r + x * math.log(x)
    return num / (p.lam * r * r)


def interior_pdf_yule(s, lam: Union[float, Params]):
    """Interior-edge length density in a pure-birth tree: Exp(2 lam)."""
    lam = _yule_rate(lam)
    return 2.0 * lam * np.exp(-2.0 * lam * s)


def interior_dist_yule(lam: Union[float, Params]) -> MixedDist:
    lam = _yule_rate(lam)
    return MixedDist(
        support_end=math.inf,
        pdf=lambda s: 2.0 * lam * np.exp(-2.0 * lam * s),
        cdf=lambda s: -np.expm1(-2.0 * lam * s),
    )


# ---------------------------------------------------------------------------
# Scenario (ii): conditioning on n and x1
# ---------------------------------------------------------------------------

def speciation_kernel(s, x1: float, p: Params):
    """Density g and CDF G of a single speciation time on (0, x1).

    g(s|x1) = p1(s)/p0(x1), G(s|x1) = p0(s)/p0(x1).
    """
    if np.any(np.asarray(s) > x1):
        raise ValueError("s must not exceed x1")
    q = p0(x1, p)
    return p1(s, p) / q, p0(s, p) / q


def speciation_time_pdf(s, k: int, n: int, x1: float, p: Params):
    """Density of the k-th speciation time given n tips and age x1.

    (n-2) C(n-3, k-2) G^{n-k-1} (1-G)^{k-2} g  for k = 2..n-1; equivalently
    the (n-k)-th smallest of n-2 i.i.d. draws from g.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if not 2 <= k <= n - 1:
        raise ValueError(f"k must lie in [2, n-1], got k={k} n={n}")
    g, G = speciation_kernel(s, x1, p)
    return (
        (n - 2) * math.comb(n - 3, k - 2)
        * G ** (n - k - 1) * (1.0 - G) ** (k - 2) * g
    )


def speciation_time_cdf(s, k: int, n: int, x1: float, p: Params):
    if not 2 <= k <= n - 1:
        raise ValueError(f"k must lie in [2, n-1], got k={k} n={n}")
    _, G = speciation_kernel(s, x1, p)
    # regularized incomplete beta: CDF of the (n-k)-th order statistic
    return special.betainc(n - k, k - 1, G)


def pendant_dist_given_n_age(n: int, x1: float, p: Params) -> MixedDist:
    """Pendant-edge law given n and x1: mixed with atom 2/(n(n-1)) at x1.

    Continuous part for s < x1:
        2(n-2)/(n(n-1)) * g(s|x1) * ((n-1) - (n-3) G(s|x1)).
    For n = 2 both pendant edges span the full age, so all mass is atomic.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    atom = 2.0 / (n * (n - 1))
    if n == 2:
        zero = lambda s: np.zeros_like(np.asarray(s, dtype=float))
        return MixedDist(support_end=x1, pdf=zero, cdf=zero, atom_weight=1.0)
    q = p0(x1, p)
    c = 2.0 * (n - 2) / (n * (n - 1))

    def pdf(s):
        g = p1(s, p) / q
        G = p0(s, p) / q
        return c * g * ((n - 1) - (n - 3) * G)

    def cdf(s):
        G = p0(s, p) / q
        return c * ((n - 1) * G - (n - 3) * G * G / 2.0)

    return MixedDist(support_end=x1, pdf=pdf, cdf=cdf, atom_weight=atom)


def pendant_mean_given_n_age(
    n: int, x1: float, p: Params, cfg: QuadratureConfig = _DEFAULT_QUAD
) -> float:
    """Expected pendant length given n and x1.

    Uses the closed forms (separate branches for mu < lam and mu = lam);
    falls back to quadrature of the density near mu = 0 and for n = 3 ties
    where the closed form divides by ~0.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n == 2:
        return x1
    lam, mu = p.lam, p.mu
    if p.is_critical:
        q = x1 / (1.0 + lam * x1)
        inner = (
            (n - 7) * x1 + (n + 1) * q
            + (6.0 - 2.0 * n + 4.0 * lam * x1) / lam * math.log1p(lam * x1)
        )
        return (2.0 * x1 + (n - 2) / (x1 * q * lam * lam) * inner) / (n * (n - 1))
    if abs(mu) <= 1e-4 * lam or abs(lam - mu) <= 1e-4 * lam:
        # closed form has 1/(lam*mu) and 1/(lam-mu) factors; integrate instead
        return pendant_dist_given_n_age(n, x1, p).mean(cfg)
    q = p0(x1, p)
    P1 = p1(x1, p)
    e = math.exp(-(lam - mu) * x1)
    a = lam - mu * e
    c_val = (
        (n - 3) * q / (lam * mu) * a
        - x1 * P1 * a / lam ** 2 * (4.0 / (lam - mu) * a - e * (n + 1))
        - math.log(1.0 - mu * q) / (lam * mu) ** 2
        * (e * mu * (-4.0 * mu - (n + 1) * (lam - mu))
           - lam * (-4.0 * lam + (n + 1) * (lam - mu)))
    )
    return (2.0 * x1 + (n - 2) / (q * (1.0 - e)) * c_val) / (n * (n - 1))


# ---------------------------------------------------------------------------
# Scenario (iii): conditioning on x1
# ---------------------------------------------------------------------------

def pendant_age_weight(k: int, x1: float, p: Params) -> float:
    """Series coefficient sum_{n>=3} ((n-2)/n)(n-k) r^{n-2} with r = lam p0(x1).

    Closed form: ((k+1)r - k)/(1-r)^2 - 2k log(1-r)/r^2 - 2k/r.
    """
    r = p.lam * p0(x1, p)
    return (
        ((k + 1) * r - k) / (1.0 - r) ** 2
        - 2.0 * k * math.log1p(-r) / (r * r)
        - 2.0 * k / r
    )


def pendant_dist_given_age(x1: float, p: Params) -> MixedDist:
    """Pendant-edge law given only the age x1 (mixture over tip counts).

    Continuous part for s < x1:
        2 p1(s) (1-r)^2 / p0(x1) * (w1 - (p0(s)/p0(x1)) w3),
    with r = lam p0(x1) and w_k = pendant_age_weight(k, x1);
    atom at x1: -2 (log(1-r) + r) ((1-r)/r)^2.
    """
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    q = p0(x1, p)
    r = p.lam * q
    w1 = pendant_age_weight(1, x1, p)
    w3 = pendant_age_weight(3, x1, p)
    # (p1(x1)/(1 - mu p0(x1)))^2 = (1-r)^2
    amp = 2.0 * (1.0 - r) ** 2 / q
    atom = -2.0 * (math.log1p(-r) + r) * ((1.0 - r) / r) ** 2

    def pdf(s):
        return amp * p1(s, p) * (w1 - p0(s, p) / q * w3)

    def cdf(s):
        u = p0(s, p)
        return amp * (w1 * u - w3 * u * u / (2.0 * q))

    return MixedDist(support_end=x1, pdf=pdf, cdf=cdf, atom_weight=atom)


# ---------------------------------------------------------------------------
# Root-edge laws (pure birth)
# ---------------------------------------------------------------------------

class PrecisionError(ValueError):
    """Raised when an evaluation would exceed its configured precision guard."""


def hypoexp_pdf(t, k: int, lam: Union[float, Params], k_cap: int = 60):
    """Density of a sum of independent Exp(2 lam), ..., Exp(k lam) variables.

    The alternating binomial series
        k(k-1) sum_{i=2..k} lam (-e^{-lam t})^i C(k-2, i-2)
    collapses exactly (binomial theorem) to the cancellation-free form
        k(k-1) lam e^{-2 lam t} (1 - e^{-lam t})^{k-2},
    which is what we evaluate.
    """
    lam = _yule_rate(lam)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > k_cap:
        raise PrecisionError(f"k={k} exceeds the configured cap {k_cap}")
    u = np.exp(-lam * np.asarray(t, dtype=float))
    return k * (k - 1) * lam * u * u * (-np.expm1(-lam * np.asarray(t, dtype=float))) ** (k - 2)


def hypoexp_cdf(t, k: int, lam: Union[float, Params], k_cap: int = 60):
    lam = _yule_rate(lam)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > k_cap:
        raise PrecisionError(f"k={k} exceeds the configured cap {k_cap}")
    v = -np.expm1(-lam * np.asarray(t, dtype=float))  # 1 - e^{-lam t}
    return k * v ** (k - 1) - (k - 1) * v ** k


def hypoexp_mean(k: int, lam: Union[float, Params]) -> float:
    lam = _yule_rate(lam)
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return sum(1.0 / (i * lam) for i in range(2, k + 1))


def root_edge_pdf_given_n(t, n: int, lam: Union[float, Params]):
    """Density of a fair-coin root edge given n (pure birth).

    f_L(t|n) = lam e^{-lam t} (1 - (1 - e^{-lam t})^{n-2} (1 - n e^{-lam t})).
    """
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    u = np.exp(-lam * np.asarray(t, dtype=float))
    return lam * u * (1.0 - (1.0 - u) ** (n - 2) * (1.0 - n * u))


def root_edge_cdf_given_n(t, n: int, lam: Union[float, Params]):
    # antiderivative: V + V^{n-1} e^{-lam t} with V = 1 - e^{-lam t}
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    u = np.exp(-lam * np.asarray(t, dtype=float))
    v = 1.0 - u
    return v + v ** (n - 1) * u


def root_edge_mean_given_n(n: int, lam: Union[float, Params]) -> float:
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return (1.0 - 1.0 / n) / lam


def root_edge_survival_given_age(l, x1: float, lam: Union[float, Params]):
    """P(L > l | x1) = e^{-lam l} for l < x1, 0 beyond (pure birth)."""
    lam = _yule_rate(lam)
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    l = np.asarray(l, dtype=float)
    if np.any(l < 0):
        raise ValueError("l must be >= 0")
    out = np.where(l < x1, np.exp(-lam * l), 0.0)
    return out if out.ndim else float(out)


def root_edge_mean_given_age(x1: float, lam: Union[float, Params]) -> float:
    lam = _yule_rate(lam)
    return -math.expm1(-lam * x1) / lam


def initial_edge_survival(l, t: float, k: int, lam: Union[float, Params]):
    """P(initial edge > l | k tips at time t) = alpha^{k-1} (pure birth),

    with alpha = (1 - e^{-lam(t-l)})/(1 - e^{-lam t}); 0 for l >= t.
    """
    lam = _yule_rate(lam)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    l = np.asarray(l, dtype=float)
    if np.any(l < 0):
        raise ValueError("l must be >= 0")
    with np.errstate(invalid="ignore"):
        alpha = np.expm1(-lam * (t - l)) / np.expm1(-lam * t)
    out = np.where(l < t, alpha ** (k - 1), 0.0)
    return out if out.ndim else float(out)


def root_edge_survival_given_n_age(l, n: int, x1: float, lam: Union[float, Params]):
    """P(L > l | n, x1) = (1/(n-1)) (1 - alpha^{n-1})/(1 - alpha), 0 past x1.

    Equivalent to the geometric mean-sum (1/(n-1)) sum_{j=0..n-2} alpha^j,
    which is what the limit handling below reproduces as alpha -> 1.
    """
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    scalar = np.isscalar(l)
    l = np.atleast_1d(np.asarray(l, dtype=float))
    if np.any(l < 0):
        raise ValueError("l must be >= 0")
    m = n - 1
    out = np.zeros_like(l)
    inside = l <= x1
    li = l[inside]
    alpha = np.expm1(-lam * (x1 - li)) / np.expm1(-lam * x1)
    eps = 1.0 - alpha
    vals = np.empty_like(alpha)
    near = m * np.abs(eps) < 1e-8
    # first-order expansion of the geometric sum around alpha = 1
    vals[near] = 1.0 - (m - 1) * eps[near] / 2.0
    far = ~near
    with np.errstate(divide="ignore"):  # log1p(-1) = -inf at l = x1 is fine
        vals[far] = -np.expm1(m * np.log1p(-eps[far])) / (m * eps[far])
    out[inside] = vals
    return float(out[0]) if scalar else out


def root_edge_limit_constant(cfg: QuadratureConfig = _DEFAULT_QUAD) -> float:
    """The constant c = int_0^inf (1 - e^{-x}) / (x(2+x)) dx = 0.8158...

    Scaled by 1/lam, this is the large-n limit of the expected root-edge
    length when lam is set to its ML value ln(n/2)/x1.
    """
    def integrand(x):
        if x == 0.0:
            return 0.5  # removable singularity
        return -math.expm1(-x) / (x * (2.0 + x))

    val, err = integrate.quad(
        integrand, 0.0, np.inf,
        epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=max(cfg.max_subdivisions, 400),
    )
    if not math.isfinite(val) or err > 1e-6:
        raise RuntimeError(f"quadrature did not converge (err={err})")
    return val


# ---------------------------------------------------------------------------
# Diversity (sum of all edge lengths, pure birth)
# ---------------------------------------------------------------------------

def diversity_pdf_given_n(d, n: int, lam: Union[float, Params]):
    """Diversity density given n: gamma with shape n-1 and rate lam."""
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return stats.gamma.pdf(d, n - 1, scale=1.0 / lam)


def diversity_cdf_given_n(d, n: int, lam: Union[float, Params]):
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return stats.gamma.cdf(d, n - 1, scale=1.0 / lam)


def diversity_mean_given_n(n: int, lam: Union[float, Params]) -> float:
    lam = _yule_rate(lam)
    return (n - 1) / lam


def diversity_var_given_n(n: int, lam: Union[float, Params]) -> float:
    lam = _yule_rate(lam)
    return (n - 1) / lam ** 2


def diversity_mgf_given_n_age(s, n: int, x1: float, lam: Union[float, Params]):
    """MGF of diversity given n and x1 (pure birth):

    e^{2 x1 s} (lam (1 - e^{(s-lam) x1}) / ((lam-s)(1 - e^{-lam x1})))^{n-2}.
    Defined for s < lam; the factor has a removable singularity at s = lam.
    """
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    s = np.asarray(s, dtype=float)
    if np.any(s >= lam):
        raise ValueError("MGF argument must be < lam")
    d = lam - s
    # (1 - e^{-d x1})/d, stable as d -> 0
    ratio = np.where(
        np.abs(d * x1) < 1e-8,
        x1 * (1.0 - d * x1 / 2.0),
        -np.expm1(-d * x1) / np.where(d == 0.0, 1.0, d),
    )
    base = lam * ratio / (-math.expm1(-lam * x1))
    out = np.exp(2.0 * x1 * s) * base ** (n - 2)
    return out if out.ndim else float(out)


def diversity_mean_given_n_age(n: int, x1: float, lam: Union[float, Params]) -> float:
    """E[D|n,x1] = 2 x1 + (n-2) E[S] with S a speciation time on (0, x1)."""
    lam = _yule_rate(lam)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n == 2:
        return 2.0 * x1
    v = -math.expm1(-lam * x1)
    mean_s = 1.0 / lam - x1 * (1.0 - v) / v
    return 2.0 * x1 + (n - 2) * mean_s


def diversity_mean_given_age(x1: float, lam: Union[float, Params]) -> float:
    """E[D|x1] = (2/lam)(e^{lam x1} - 1) (pure birth)."""
    lam = _yule_rate(lam)
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    return 2.0 * math.expm1(lam * x1) / lam
