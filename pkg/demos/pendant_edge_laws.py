"""Pendant-edge length laws under the three conditioning scenarios.

Walks through the pendant-edge distribution (the edge above a randomly
chosen tip) when we condition on (i) the tip count n, (ii) both n and the
MRCA age x1, and (iii) x1 alone, overlaying Monte Carlo histograms from
the exact samplers on the closed-form densities.

Run:  python demos/pendant_edge_laws.py
"""

import numpy as np

from recontree import Params, RngStream, dists, mc, sim

LAM, MU = 1.0, 0.5
P = Params(LAM, MU)
REPS = 20_000


def histogram_vs_density(samples, pdf, edges, mass=1.0):
    """Print a crude side-by-side comparison on a fixed grid."""
    counts, _ = np.histogram(samples, bins=edges)
    widths = np.diff(edges)
    emp = counts / counts.sum() / widths * mass
    mids = 0.5 * (edges[:-1] + edges[1:])
    print(f"  {'s':>6} {'empirical':>10} {'analytic':>10}")
    for m, e, a in zip(mids, emp, pdf(mids)):
        print(f"  {m:6.3f} {e:10.4f} {a:10.4f}")


def scenario_given_n():
    print("\n=== scenario (i): conditioned on n ===")
    print("The law is the same for every n; with extinction it is")
    print("2*lam*p1(s)*(1 - lam*p0(s)), reducing to Exp(2*lam) when mu=0.\n")
    rng = RngStream(1, 0).generator()
    # pure birth so we can use the fixed-n sampler
    samples = np.array([
        mc.extract_random_pendant(sim.sample_yule_given_n(20, LAM, rng), rng)
        for _ in range(REPS)
    ])
    edges = np.linspace(0.0, 2.5, 11)
    histogram_vs_density(samples, lambda s: 2 * LAM * np.exp(-2 * LAM * s), edges)
    print(f"\n  sample mean {samples.mean():.4f}  "
          f"analytic {dists.pendant_mean_given_n(Params(LAM, 0.0)):.4f}")


def scenario_given_n_age():
    n, x1 = 6, 2.0
    print(f"\n=== scenario (ii): conditioned on n={n} and x1={x1} ===")
    law = dists.pendant_dist_given_n_age(n, x1, P)
    print(f"Mixed law: atom of mass 2/(n(n-1)) = {law.atom_weight:.4f} at s = x1")
    print("(a pendant edge attached directly to the root spans the full age).\n")
    rng = RngStream(2, 0).generator()
    samples = np.array([
        mc.extract_random_pendant(sim.sample_given_n_age(n, x1, P, rng), rng)
        for _ in range(REPS)
    ])
    at_atom = np.abs(samples - x1) <= 1e-9 * x1
    edges = np.linspace(0.0, x1, 9)
    histogram_vs_density(samples[~at_atom], law.pdf, edges,
                         mass=1.0 - law.atom_weight)
    print(f"\n  atom fraction {at_atom.mean():.4f}  analytic {law.atom_weight:.4f}")
    print(f"  sample mean {samples.mean():.4f}  "
          f"closed form {dists.pendant_mean_given_n_age(n, x1, P):.4f}")


def scenario_given_age():
    x1 = 1.5
    print(f"\n=== scenario (iii): conditioned on x1={x1} alone ===")
    print("Marginalizing the tip count gives another mixed law; its density")
    print("is the p_n(x1)-weighted mixture of the scenario (ii) densities:\n")
    law = dists.pendant_dist_given_age(x1, P)
    grid = np.linspace(0.1, 1.4, 6)
    from recontree.kernel import prob_n_given_age
    mixture = sum(
        prob_n_given_age(n, x1, P) * dists.pendant_dist_given_n_age(n, x1, P).pdf(grid)
        for n in range(3, 400)
    )
    for s, d, m in zip(grid, law.pdf(grid), mixture):
        print(f"  s={s:.2f}  closed form {d:.6f}  mixture {m:.6f}")
    rng = RngStream(3, 0).generator()
    samples = np.array([
        mc.extract_random_pendant(sim.sample_given_age(x1, P, rng), rng)
        for _ in range(REPS)
    ])
    at_atom = np.abs(samples - x1) <= 1e-9 * x1
    print(f"\n  atom fraction {at_atom.mean():.4f}  analytic {law.atom_weight:.4f}")


if __name__ == "__main__":
    print(f"pendant-edge laws at lam={LAM}, mu={MU} ({REPS} trees per scenario)")
    scenario_given_n()
    scenario_given_n_age()
    scenario_given_age()
