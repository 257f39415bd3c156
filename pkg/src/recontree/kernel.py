"""Parameter handling and the elementary probability kernels.

The whole library is parameterized by a speciation rate ``lam`` and an
(effective) extinction rate ``mu``.  Incomplete sampling with probability
``f`` is folded into these two numbers up front: a process with raw rates
(lambda_hat, mu_hat) and sampling fraction f induces the same distribution
on reconstructed trees as a completely sampled process with

    lam = f * lambda_hat
    mu  = mu_hat - lambda_hat * (1 - f)

Note that ``mu`` may come out negative; every downstream formula remains
valid for mu < lam, so we accept the full range.

The kernels p0 and p1 are defined so that mu*p0(s) and p1(s) are the
probabilities of a lineage leaving 0 and exactly 1 surviving sampled
descendant after time s.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RawParams",
    "Params",
    "Regime",
    "transform_params",
    "p0",
    "p1",
    "prob_n_given_age",
]


@dataclass(frozen=True)
class RawParams:
    """Raw birth-death parameters before the sampling transformation."""

    lambda_hat: float
    mu_hat: float
    f: float = 1.0

    def __post_init__(self):
        if not self.lambda_hat > 0:
            raise ValueError(f"lambda_hat must be > 0, got {self.lambda_hat}")
        if not 0 <= self.mu_hat <= self.lambda_hat:
            raise ValueError(
                f"mu_hat must lie in [0, lambda_hat], got {self.mu_hat}"
            )
        if not 0 < self.f <= 1:
            raise ValueError(f"f must lie in (0, 1], got {self.f}")


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"  # mu < lam (includes mu < 0)
    CRITICAL = "critical"        # |lam - mu| within tolerance
    YULE = "yule"                # mu within tolerance of 0


@dataclass(frozen=True)
class Params:
    """Transformed (complete-sampling) parameters.

    ``critical_tol`` is the absolute threshold below which |lam - mu| is
    treated as zero; the subcritical closed forms suffer 0/0 cancellation
    there and the critical-branch formulas are used instead.
    """

    lam: float
    mu: float = 0.0
    critical_tol: float = field(default=0.0)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.mu > self.lam:
            raise ValueError(f"mu must be <= lam, got mu={self.mu} lam={self.lam}")
        if self.critical_tol == 0.0:
            object.__setattr__(self, "critical_tol", 1e-8 * self.lam)
        if not self.critical_tol > 0:
            raise ValueError("critical_tol must be > 0")

    @property
    def regime(self) -> Regime:
        if abs(self.lam - self.mu) <= self.critical_tol:
            return Regime.CRITICAL
        if abs(self.mu) <= self.critical_tol:
            return Regime.YULE
        return Regime.SUBCRITICAL

    @property
    def is_critical(self) -> bool:
        return self.regime is Regime.CRITICAL

    @property
    def is_yule(self) -> bool:
        return self.regime is Regime.YULE


def transform_params(raw: RawParams) -> Params:
    """Fold incomplete sampling into effective complete-sampling rates."""
    lam = raw.f * raw.lambda_hat
    mu = raw.mu_hat - raw.lambda_hat * (1.0 - raw.f)
    return Params(lam=lam, mu=mu)


def p0(s: float, p: Params) -> float:
    """Kernel p0: mu*p0(s) is the probability of 0 surviving sampled offspring.

    Subcritical: (1 - e^{-(lam-mu)s}) / (lam - mu e^{-(lam-mu)s});
    critical:    s / (1 + lam s).

    Strictly increasing from 0, with lam*p0(s) < 1 for finite s.
    Accepts scalars or numpy arrays.
    """
    if np.any(np.asarray(s) < 0):
        raise ValueError(f"s must be >= 0, got {s}")
    if p.is_critical:
        return s / (1.0 + p.lam * s)
    d = p.lam - p.mu
    em = -np.expm1(-d * s)  # 1 - e^{-d s}, accurate for small d*s
    return em / (p.lam - p.mu * (1.0 - em))


def p1(s: float, p: Params) -> float:
    """Kernel p1: probability of exactly 1 surviving sampled offspring.

    Subcritical: (lam-mu)^2 e^{-(lam-mu)s} / (lam - mu e^{-(lam-mu)s})^2;
    critical:    1 / (1 + lam s)^2.
    Accepts scalars or numpy arrays.
    """
    if np.any(np.asarray(s) < 0):
        raise ValueError(f"s must be >= 0, got {s}")
    if p.is_critical:
        return 1.0 / (1.0 + p.lam * s) ** 2
    d = p.lam - p.mu
    e = np.exp(-d * s)
    return d * d * e / (p.lam - p.mu * e) ** 2


def prob_n_given_age(n: int, x1: float, p: Params) -> float:
    """Probability that a reconstructed tree of age x1 has n extant tips.

    p_n(x1) = (n-1) p1(x1)^2 (lam p0(x1))^{n-2} / (1 - mu p0(x1))^2,
    which simplifies to (n-1) (1-r)^2 r^{n-2} with r = lam*p0(x1),
    using the identity p1 = (1 - mu p0)(1 - lam p0).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not x1 > 0:
        raise ValueError(f"x1 must be > 0, got {x1}")
    r = p.lam * p0(x1, p)
    return (n - 1) * (1.0 - r) ** 2 * r ** (n - 2)
