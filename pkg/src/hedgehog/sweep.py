"""Monte-Carlo invertibility sweep over random constellations."""

import numpy as np

from .constellation import Constellation, random_directions
from .gram import diagnostics, gram
from .spin import as_spin


COLUMNS = [
    "spin",
    "doubled_spin",
    "n_points",
    "trials",
    "pass_fraction",
    "median_log_abs_det",
    "median_condition_number",
    "min_relative_eigenvalue",
    "tau_relative",
]


def trial_constellation(s, seed, trial):
    rng = np.random.default_rng([seed, s.doubled_spin, trial])
    return Constellation(s, random_directions(rng, s.n_points()), label=f"trial {trial}")


def sweep(spins, trials, seed, tau=1e-12):
    """
    For each spin, draw ``trials`` uniform random constellations and test
    lambda_min > tau * lambda_max. Returns one dict per spin (keys ``COLUMNS``).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rows = []
    for s in spins:
        s = as_spin(s)
        passes, logdets, conds, rel = 0, [], [], []
        for trial in range(trials):
            d = diagnostics(gram(trial_constellation(s, seed, trial)), tau, relative=True)
            passes += d.is_basis
            logdets.append(d.log_abs_det)
            conds.append(d.condition_number)
            rel.append(d.min_eigenvalue / d.max_eigenvalue)
        rows.append(
            {
                "spin": str(s),
                "doubled_spin": s.doubled_spin,
                "n_points": s.n_points(),
                "trials": trials,
                "pass_fraction": passes / trials,
                "median_log_abs_det": float(np.median(logdets)),
                "median_condition_number": float(np.median(conds)),
                "min_relative_eigenvalue": float(min(rel)),
                "tau_relative": float(tau),
            }
        )
    return rows
