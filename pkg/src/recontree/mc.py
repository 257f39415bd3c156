"""Monte Carlo estimation and statistical comparison against analytic laws.

The harness draws trees from a sampler, extracts a per-tree statistic
(e.g. a uniformly chosen pendant edge length), and compares the empirical
distribution with the corresponding closed-form law.  Mixed distributions
are handled by separating the atom: the KS test runs on the continuous
part against the renormalized conditional CDF, and the atom mass is
checked separately with a binomial confidence interval.

Conventions (fixed for the whole tool):
* one-sample KS threshold 1.6276/sqrt(m) (asymptotic 99% level),
* atom and two-sample checks at the 99% level,
* moment checks within 3 standard errors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy import stats as sps

from . import dists, sim
from .dists import MixedDist
from .kernel import Params, RawParams, prob_n_given_age, transform_params
from .tree import ReconTree

__all__ = [
    "EmpiricalDist",
    "ComparisonReport",
    "KsCheck",
    "AtomCheck",
    "MomentCheck",
    "VerifyConfig",
    "estimate",
    "compare",
    "compare_two_sample",
    "chi_square_counts",
    "verify_suite",
    "CHECK_NAMES",
    "extract_random_pendant",
    "extract_random_interior",
    "extract_random_root_edge",
    "extract_diversity",
    "extract_leaf_count",
]

KS_COEFF_99 = 1.6276  # sqrt(-0.5 ln(0.01/2))
Z_99 = 2.5758


# ---------------------------------------------------------------------------
# Extractors (per-tree statistics)
# ---------------------------------------------------------------------------

def extract_random_pendant(t: ReconTree, rng) -> float:
    lens = t.times[t.parent[: t.n]]  # leaf ages are 0
    return float(lens[int(rng.integers(t.n))])


def extract_random_interior(t: ReconTree, rng) -> float:
    root = t.root
    nodes = [v for v in range(t.n, 2 * t.n - 1) if v != root]
    v = nodes[int(rng.integers(len(nodes)))]
    return float(t.times[t.parent[v]] - t.times[v])


def extract_random_root_edge(t: ReconTree, rng) -> float:
    root = t.root
    c = t.children_of(root)[int(rng.integers(2))]
    return float(t.times[root] - t.times[c])


def extract_diversity(t: ReconTree, rng) -> float:
    lens = t.times[np.maximum(t.parent, 0)] - t.times
    lens[t.root] = 0.0
    return float(lens.sum())


def extract_leaf_count(t: ReconTree, rng) -> float:
    return float(t.n)


# ---------------------------------------------------------------------------
# Empirical distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalDist:
    """Sorted Monte Carlo samples with an optional declared atom bucket."""

    samples: np.ndarray             # all values, sorted ascending
    atom_location: Optional[float] = None
    atom_count: int = 0

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def atom_fraction(self) -> float:
        return self.atom_count / self.n_samples if self.n_samples else 0.0

    def continuous(self) -> np.ndarray:
        """Samples outside the atom bucket (still sorted)."""
        if self.atom_count == 0:
            return self.samples
        return self.samples[: self.n_samples - self.atom_count]

    def mean(self) -> float:
        return float(self.samples.mean())

    def mean_se(self) -> float:
        return float(self.samples.std(ddof=1) / np.sqrt(self.n_samples))

    def ecdf(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="right") / self.n_samples


def estimate(
    sampler: Callable[[np.random.Generator], ReconTree],
    extractor: Callable[[ReconTree, np.random.Generator], float],
    reps: int,
    rng,
    atom_at: Optional[float] = None,
) -> EmpiricalDist:
    """Draw ``reps`` trees and collect one statistic per tree.

    Values within 1e-9*atom_at of ``atom_at`` are counted into the atom
    bucket (samplers place atom samples exactly at x1 up to rounding).
    """
    if reps < 1000:
        raise ValueError(f"reps must be >= 1000, got {reps}")
    rng = sim.as_generator(rng)
    vals = np.empty(reps)
    for i in range(reps):
        vals[i] = extractor(sampler(rng), rng)
    vals.sort()
    atom_count = 0
    if atom_at is not None:
        eps = 1e-9 * atom_at
        atom_count = int(np.count_nonzero(np.abs(vals - atom_at) <= eps))
    return EmpiricalDist(samples=vals, atom_location=atom_at, atom_count=atom_count)


def collect(sampler, extractors: dict, reps: int, rng) -> dict:
    """Apply several extractors to one stream of trees; returns name->array."""
    rng = sim.as_generator(rng)
    out = {name: np.empty(reps) for name in extractors}
    for i in range(reps):
        t = sampler(rng)
        for name, ex in extractors.items():
            out[name][i] = ex(t, rng)
    return out


# ---------------------------------------------------------------------------
# Comparison reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KsCheck:
    stat: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.stat < self.threshold

    def to_dict(self):
        return {"stat": self.stat, "threshold": self.threshold, "pass": self.passed}


@dataclass(frozen=True)
class MomentCheck:
    name: str
    analytic: float
    empirical: float
    tolerance: float  # absolute: 3*SE for MC checks, stated tol for numeric

    @property
    def passed(self) -> bool:
        return abs(self.analytic - self.empirical) <= self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "analytic": self.analytic,
            "empirical": self.empirical,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class AtomCheck:
    analytic_mass: float
    empirical_fraction: float
    ci_halfwidth: float  # 99% binomial CI around the analytic mass

    @property
    def passed(self) -> bool:
        return abs(self.analytic_mass - self.empirical_fraction) <= self.ci_halfwidth

    def to_dict(self):
        return {
            "analytic_mass": self.analytic_mass,
            "empirical_fraction": self.empirical_fraction,
            "ci_halfwidth": self.ci_halfwidth,
            "pass": self.passed,
        }


@dataclass
class ComparisonReport:
    check: str
    n_samples: int
    seed: Optional[int] = None
    ks: Optional[KsCheck] = None
    moments: List[MomentCheck] = field(default_factory=list)
    atom: Optional[AtomCheck] = None
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        parts = [m.passed for m in self.moments]
        if self.ks is not None:
            parts.append(self.ks.passed)
        if self.atom is not None:
            parts.append(self.atom.passed)
        return all(parts) if parts else False

    def to_dict(self):
        return {
            "check": self.check,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "ks": self.ks.to_dict() if self.ks else None,
            "moments": [m.to_dict() for m in self.moments],
            "atom": self.atom.to_dict() if self.atom else None,
            "pass": self.passed,
            "wall_time_s": self.wall_time_s,
        }


def ks_one_sample(sorted_samples: np.ndarray, cdf: Callable) -> float:
    """KS distance of sorted samples against a vectorized CDF."""
    m = sorted_samples.shape[0]
    if m == 0:
        return 0.0
    f = np.asarray(cdf(sorted_samples), dtype=float)
    grid = np.arange(1, m + 1) / m
    return float(np.max(np.maximum(np.abs(f - grid), np.abs(f - (grid - 1.0 / m)))))


def compare(
    emp: EmpiricalDist,
    analytic: Union[MixedDist, Callable],
    check: str = "",
    analytic_mean: Optional[float] = None,
    seed: Optional[int] = None,
) -> ComparisonReport:
    """One-sample comparison of an empirical against an analytic law.

    KS runs on the continuous part only (atom-conditioned and
    renormalized); the atom mass is compared via a 99% binomial CI; the
    mean, when given, within 3 standard errors.
    """
    if np.any(np.diff(emp.samples) < 0):
        raise ValueError("samples must be sorted")
    t0 = time.perf_counter()
    report = ComparisonReport(check=check, n_samples=emp.n_samples, seed=seed)
    cont = emp.continuous()
    if isinstance(analytic, EmpiricalDist):
        # exact sup-distance between the two step functions (0 for self)
        stat = float(sps.ks_2samp(cont, analytic.continuous()).statistic)
        report.ks = KsCheck(stat=stat, threshold=KS_COEFF_99 / np.sqrt(len(cont)))
    elif isinstance(analytic, MixedDist):
        aw = analytic.atom_weight
        if aw < 1.0:
            cond = lambda s: analytic.cdf(s) / (1.0 - aw)
            stat = ks_one_sample(cont, cond)
            report.ks = KsCheck(stat=stat, threshold=KS_COEFF_99 / np.sqrt(len(cont)))
        if aw > 0.0 or emp.atom_location is not None:
            half = Z_99 * np.sqrt(max(aw * (1.0 - aw), 1e-300) / emp.n_samples)
            report.atom = AtomCheck(
                analytic_mass=aw,
                empirical_fraction=emp.atom_fraction,
                ci_halfwidth=max(half, 3.0 / emp.n_samples),
            )
    else:
        stat = ks_one_sample(cont, analytic)
        report.ks = KsCheck(stat=stat, threshold=KS_COEFF_99 / np.sqrt(len(cont)))
    if analytic_mean is not None:
        report.moments.append(
            MomentCheck(
                name="mean",
                analytic=analytic_mean,
                empirical=emp.mean(),
                tolerance=3.0 * emp.mean_se(),
            )
        )
    report.wall_time_s = time.perf_counter() - t0
    return report


def compare_two_sample(
    a: np.ndarray, b: np.ndarray, check: str = "", alpha: float = 0.01,
    seed: Optional[int] = None,
) -> ComparisonReport:
    """Two-sample KS comparison; passes when p > alpha."""
    res = sps.ks_2samp(a, b)
    report = ComparisonReport(check=check, n_samples=len(a) + len(b), seed=seed)
    # encode the p-value check as "stat < threshold" on (1 - p)
    report.ks = KsCheck(stat=1.0 - float(res.pvalue), threshold=1.0 - alpha)
    return report


def chi_square_counts(
    values: np.ndarray, pmf: Callable[[int], float], start: int = 2,
    min_expected: float = 5.0,
) -> float:
    """Chi-square goodness-of-fit p-value for integer-valued samples.

    Bins from ``start`` upward, pooling the tail so every expected count
    is at least ``min_expected``.
    """
    values = np.asarray(values)
    m = len(values)
    kmax = int(values.max())
    ks = np.arange(start, kmax + 1)
    probs = np.array([pmf(int(k)) for k in ks])
    tail = max(1.0 - probs.sum(), 0.0)
    observed = np.array([np.count_nonzero(values == k) for k in ks])
    observed = np.append(observed, m - observed.sum())
    expected = np.append(probs, tail) * m
    # pool small-expectation bins from the right
    while len(expected) > 2 and expected[-1] < min_expected:
        expected[-2] += expected[-1]
        observed[-2] += observed[-1]
        expected = expected[:-1]
        observed = observed[:-1]
    _, p = sps.chisquare(observed, expected)
    return float(p)


# ---------------------------------------------------------------------------
# Verification suite (drives the acceptance table)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerifyConfig:
    checks: Sequence[str] = ()
    reps: int = 100_000
    seed: int = 20260824


def _timed(fn):
    def wrapper(cfg: VerifyConfig) -> List[ComparisonReport]:
        t0 = time.perf_counter()
        reports = fn(cfg)
        dt = time.perf_counter() - t0
        for r in reports:
            if r.wall_time_s == 0.0:
                r.wall_time_s = dt / len(reports)
        return reports
    return wrapper


@_timed
def _check_yule_pendant_n(cfg):
    rng = sim.RngStream(cfg.seed, 1).generator()
    lam, n = 1.0, 20
    emp = estimate(
        lambda r: sim.sample_yule_given_n(n, lam, r),
        extract_random_pendant, cfg.reps, rng,
    )
    rep = compare(
        emp, lambda s: -np.expm1(-2.0 * lam * s),
        check="yule_pendant_n", analytic_mean=1.0 / (2.0 * lam), seed=cfg.seed,
    )
    return [rep]


@_timed
def _check_yule_interior_n(cfg):
    rng = sim.RngStream(cfg.seed, 2).generator()
    lam, n = 1.0, 20
    emp = estimate(
        lambda r: sim.sample_yule_given_n(n, lam, r),
        extract_random_interior, cfg.reps, rng,
    )
    rep = compare(
        emp, lambda s: -np.expm1(-2.0 * lam * s),
        check="yule_interior_n", analytic_mean=1.0 / (2.0 * lam), seed=cfg.seed,
    )
    return [rep]


@_timed
def _check_root_edge_n(cfg):
    lam = 1.0
    out = []
    for i, n in enumerate((2, 4, 10)):
        rng = sim.RngStream(cfg.seed, 10 + i).generator()
        emp = estimate(
            lambda r: sim.sample_yule_given_n(n, lam, r),
            extract_random_root_edge, cfg.reps, rng,
        )
        out.append(compare(
            emp, lambda t: dists.root_edge_cdf_given_n(t, n, lam),
            check=f"root_edge_n:n={n}",
            analytic_mean=dists.root_edge_mean_given_n(n, lam), seed=cfg.seed,
        ))
    return out


@_timed
def _check_root_edge_mean(cfg):
    lam, n = 1.0, 4
    rng = sim.RngStream(cfg.seed, 13).generator()
    emp = estimate(
        lambda r: sim.sample_yule_given_n(n, lam, r),
        extract_random_root_edge, max(cfg.reps // 10, 1000), rng,
    )
    rep = ComparisonReport(check="root_edge_mean", n_samples=emp.n_samples, seed=cfg.seed)
    rep.moments.append(MomentCheck(
        name="mean", analytic=dists.root_edge_mean_given_n(n, lam),
        empirical=emp.mean(), tolerance=3.0 * emp.mean_se(),
    ))
    return [rep]


@_timed
def _check_diversity_gamma(cfg):
    lam, n = 1.0, 10
    rng = sim.RngStream(cfg.seed, 20).generator()
    emp = estimate(
        lambda r: sim.sample_yule_given_n(n, lam, r),
        extract_diversity, cfg.reps, rng,
    )
    rep = compare(
        emp, lambda d: dists.diversity_cdf_given_n(d, n, lam),
        check="diversity_gamma",
        analytic_mean=dists.diversity_mean_given_n(n, lam), seed=cfg.seed,
    )
    # variance within 3 SE of the sample variance
    m = emp.n_samples
    svar = float(emp.samples.var(ddof=1))
    mu4 = float(np.mean((emp.samples - emp.samples.mean()) ** 4))
    var_se = np.sqrt(max(mu4 - svar ** 2, 0.0) / m)
    rep.moments.append(MomentCheck(
        name="variance", analytic=dists.diversity_var_given_n(n, lam),
        empirical=svar, tolerance=3.0 * var_se,
    ))
    return [rep]


_PENDANT_NX1_GRID = [(1.0, 0.0), (1.0, 0.5), (1.0, 1.0)]


@_timed
def _check_pendant_given_n_age(cfg):
    x1 = 2.0
    out = []
    sid = 30
    for lam, mu in _PENDANT_NX1_GRID:
        p = Params(lam=lam, mu=mu)
        for n in (3, 6):
            rng = sim.RngStream(cfg.seed, sid).generator()
            sid += 1
            emp = estimate(
                lambda r: sim.sample_given_n_age(n, x1, p, r),
                extract_random_pendant, cfg.reps, rng, atom_at=x1,
            )
            law = dists.pendant_dist_given_n_age(n, x1, p)
            out.append(compare(
                emp, law, check=f"pendant_given_n_age:lam={lam},mu={mu},n={n}",
                seed=cfg.seed,
            ))
    return out


@_timed
def _check_given_age_n_law(cfg):
    lam, mu, x1 = 1.0, 0.4, 1.5
    p = Params(lam=lam, mu=mu)
    rng = sim.RngStream(cfg.seed, 40).generator()
    data = collect(
        lambda r: sim.sample_given_age(x1, p, r),
        {"n": extract_leaf_count, "pendant": extract_random_pendant},
        cfg.reps, rng,
    )
    ns = data["n"].astype(int)
    p_chi = chi_square_counts(ns, lambda n: prob_n_given_age(n, x1, p))
    rep_n = ComparisonReport(check="given_age_n_law:n", n_samples=cfg.reps, seed=cfg.seed)
    rep_n.ks = KsCheck(stat=1.0 - p_chi, threshold=0.99)
    pend = np.sort(data["pendant"])
    eps = 1e-9 * x1
    atom_count = int(np.count_nonzero(np.abs(pend - x1) <= eps))
    emp = EmpiricalDist(samples=pend, atom_location=x1, atom_count=atom_count)
    law = dists.pendant_dist_given_age(x1, p)
    rep_p = compare(emp, law, check="given_age_n_law:pendant", seed=cfg.seed)
    return [rep_n, rep_p]


@_timed
def _check_transform_equivalence(cfg):
    raw = RawParams(lambda_hat=2.0, mu_hat=0.5, f=0.5)
    p = transform_params(raw)
    x1 = 1.0
    rng_a = sim.RngStream(cfg.seed, 50).generator()
    rng_b = sim.RngStream(cfg.seed, 51).generator()
    extractors = {
        "pendant": extract_random_pendant,
        "diversity": extract_diversity,
        "n": extract_leaf_count,
    }
    direct = collect(
        lambda r: sim.sample_given_age(x1, p, r), extractors, cfg.reps, rng_a,
    )
    rejected = collect(
        lambda r: sim.sample_rejection_given_age(x1, raw, r), extractors,
        cfg.reps, rng_b,
    )
    return [
        compare_two_sample(
            direct[name], rejected[name],
            check=f"transform_equivalence:{name}", seed=cfg.seed,
        )
        for name in extractors
    ]


_MIXTURE_GRID = [(1.0, 0.4, 1.5), (1.0, 0.0, 1.0), (1.0, 0.9, 2.0)]


@_timed
def _check_mixture_identity(cfg):
    out = []
    for lam, mu, x1 in _MIXTURE_GRID:
        p = Params(lam=lam, mu=mu)
        law = dists.pendant_dist_given_age(x1, p)
        grid = np.linspace(x1 * 1e-3, x1 * (1.0 - 1e-3), 50)
        mix = np.zeros_like(grid)
        for n in range(3, 501):
            pn = prob_n_given_age(n, x1, p)
            mix += pn * dists.pendant_dist_given_n_age(n, x1, p).pdf(grid)
        err = float(np.max(np.abs(mix - law.pdf(grid))))
        rep = ComparisonReport(check=f"mixture_identity:lam={lam},mu={mu},x1={x1}",
                               n_samples=0, seed=cfg.seed)
        rep.moments.append(MomentCheck(
            name="max_abs_density_gap", analytic=0.0, empirical=err, tolerance=1e-6,
        ))
        atom_sum = sum(
            2.0 / (n * (n - 1)) * prob_n_given_age(n, x1, p) for n in range(2, 2001)
        )
        rep.moments.append(MomentCheck(
            name="atom_gap", analytic=law.atom_weight, empirical=atom_sum,
            tolerance=1e-8,
        ))
        out.append(rep)
    return out


_MEANS_GRID = [
    (5, 2.0, 1.0, 0.5), (3, 2.0, 1.0, 0.5), (6, 1.5, 1.0, 0.4),
    (5, 2.0, 1.0, 1.0), (10, 1.0, 2.0, 2.0), (5, 2.0, 1.0, -0.5),
]


@_timed
def _check_means_vs_quadrature(cfg):
    out = []
    for n, x1, lam, mu in _MEANS_GRID:
        p = Params(lam=lam, mu=mu)
        closed = dists.pendant_mean_given_n_age(n, x1, p)
        quad = dists.pendant_dist_given_n_age(n, x1, p).mean()
        rep = ComparisonReport(check=f"means_vs_quadrature:n={n},lam={lam},mu={mu}",
                               n_samples=0, seed=cfg.seed)
        rep.moments.append(MomentCheck(
            name="pendant_mean_n_age", analytic=quad, empirical=closed,
            tolerance=1e-6 * abs(quad),
        ))
        out.append(rep)
    for lam, mu in ((1.0, 0.5), (1.0, 0.999), (2.0, -1.0)):
        p = Params(lam=lam, mu=mu)
        closed = dists.pendant_mean_given_n(p)
        quad = dists.pendant_dist_given_n(p).mean()
        rep = ComparisonReport(check=f"means_vs_quadrature:pendant_n,lam={lam},mu={mu}",
                               n_samples=0, seed=cfg.seed)
        rep.moments.append(MomentCheck(
            name="pendant_mean_n", analytic=quad, empirical=closed,
            tolerance=1e-6 * abs(quad),
        ))
        out.append(rep)
    return out


@_timed
def _check_limit_constant(cfg):
    rep = ComparisonReport(check="limit_constant", n_samples=0, seed=cfg.seed)
    c = dists.root_edge_limit_constant()
    rep.moments.append(MomentCheck(
        name="c", analytic=0.8158, empirical=c, tolerance=5e-4,
    ))
    # asymptotic survival at large n with lam at its ML value ln(n/2)/x1
    n, x1 = 1_000_000, 1.0
    lam = np.log(n / 2.0) / x1
    grid = np.linspace(0.05 * x1, 0.6 * x1, 12)
    exact = dists.root_edge_survival_given_n_age(grid, n, x1, lam)
    w = 2.0 * np.expm1(lam * grid)
    asym = -np.expm1(-w) / w
    rel = float(np.max(np.abs(exact - asym) / asym))
    rep.moments.append(MomentCheck(
        name="asymptotic_survival_rel_err", analytic=0.0, empirical=rel,
        tolerance=1e-3,
    ))
    return [rep]


@_timed
def _check_diversity_mean_age(cfg):
    lam, x1 = 1.0, 1.0
    p = Params(lam=lam, mu=0.0)
    rng = sim.RngStream(cfg.seed, 60).generator()
    emp = estimate(
        lambda r: sim.sample_given_age(x1, p, r), extract_diversity, cfg.reps, rng,
    )
    rep = ComparisonReport(check="diversity_mean_age", n_samples=emp.n_samples,
                           seed=cfg.seed)
    rep.moments.append(MomentCheck(
        name="mean", analytic=dists.diversity_mean_given_age(x1, lam),
        empirical=emp.mean(), tolerance=3.0 * emp.mean_se(),
    ))
    # MGF derivative vs sampler mean under fixed (n, x1)
    n2, x2 = 6, 2.0
    rng2 = sim.RngStream(cfg.seed, 61).generator()
    emp2 = estimate(
        lambda r: sim.sample_given_n_age(n2, x2, p, r), extract_diversity,
        cfg.reps, rng2,
    )
    h = 1e-6
    mgf_mean = (dists.diversity_mgf_given_n_age(h, n2, x2, lam)
                - dists.diversity_mgf_given_n_age(-h, n2, x2, lam)) / (2.0 * h)
    rep.moments.append(MomentCheck(
        name="mgf_derivative_vs_sampler", analytic=mgf_mean,
        empirical=emp2.mean(), tolerance=3.0 * emp2.mean_se(),
    ))
    return [rep]


@_timed
def _check_normalization(cfg):
    out = []
    regimes = [Params(1.0, 0.0), Params(1.0, 0.5), Params(1.0, 1.0), Params(1.0, -0.5)]
    rep = ComparisonReport(check="normalization", n_samples=0, seed=cfg.seed)

    def add(name, value):
        rep.moments.append(MomentCheck(
            name=name, analytic=1.0, empirical=value, tolerance=1e-8,
        ))

    for p in regimes:
        tag = f"mu={p.mu}"
        add(f"pendant_n[{tag}]", dists.pendant_dist_given_n(p).total_mass())
        add(f"pendant_n_age[{tag}]",
            dists.pendant_dist_given_n_age(5, 2.0, p).total_mass())
        add(f"pendant_age[{tag}]", dists.pendant_dist_given_age(1.5, p).total_mass())
        from scipy.integrate import quad
        val, _ = quad(lambda s: dists.speciation_time_pdf(s, 3, 6, 2.0, p),
                      0.0, 2.0, epsabs=1e-12, epsrel=1e-10, limit=200)
        add(f"speciation_time[{tag}]", val)
    from scipy.integrate import quad
    for k in (2, 10, 35, 60):
        val, _ = quad(lambda t: dists.hypoexp_pdf(t, k, 1.0), 0.0, np.inf,
                      epsabs=1e-12, epsrel=1e-10, limit=200)
        add(f"hypoexp[k={k}]", val)
    for n in (2, 4, 10):
        val, _ = quad(lambda t: dists.root_edge_pdf_given_n(t, n, 1.0), 0.0, np.inf,
                      epsabs=1e-12, epsrel=1e-10, limit=200)
        add(f"root_edge_n[n={n}]", val)
        val, _ = quad(lambda d: dists.diversity_pdf_given_n(d, n, 1.0), 0.0, np.inf,
                      epsabs=1e-12, epsrel=1e-10, limit=200)
        add(f"diversity_n[n={n}]", val)
    val, _ = quad(lambda s: dists.interior_pdf_yule(s, 1.0), 0.0, np.inf,
                  epsabs=1e-12, epsrel=1e-10, limit=200)
    add("interior_yule", val)
    return [rep]


_CHECKS = {
    "yule_pendant_n": _check_yule_pendant_n,
    "yule_interior_n": _check_yule_interior_n,
    "root_edge_n": _check_root_edge_n,
    "root_edge_mean": _check_root_edge_mean,
    "diversity_gamma": _check_diversity_gamma,
    "pendant_given_n_age": _check_pendant_given_n_age,
    "given_age_n_law": _check_given_age_n_law,
    "transform_equivalence": _check_transform_equivalence,
    "mixture_identity": _check_mixture_identity,
    "means_vs_quadrature": _check_means_vs_quadrature,
    "limit_constant": _check_limit_constant,
    "diversity_mean_age": _check_diversity_mean_age,
    "normalization": _check_normalization,
}

CHECK_NAMES = tuple(_CHECKS)


def verify_suite(config: VerifyConfig) -> List[ComparisonReport]:
    """Run the named checks (all of them when none are given)."""
    names = tuple(config.checks) or CHECK_NAMES
    unknown = [c for c in names if c not in _CHECKS]
    if unknown:
        raise KeyError(
            f"unknown checks {unknown}; valid names: {', '.join(CHECK_NAMES)}"
        )
    reports: List[ComparisonReport] = []
    for name in names:
        reports.extend(_CHECKS[name](config))
    return reports
