"""
Description: Fuzz harness. Generates reproducible random zonotope configurations, runs the
             inequality checks on each of them, collects the reports in a pandas DataFrame and
             optionally saves them as a CSV file.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import logging

import pandas as pd

from bodies import UnitBall, Zonotope
from config import DEFAULT_TOLERANCES
from inequalities import AF_LOWER, CONJ_1_1, ZONOLATE, check
from util import make_rng

logger = logging.getLogger(__name__)

FUZZ_INEQUALITIES = (CONJ_1_1, ZONOLATE, AF_LOWER)
COLUMNS = ["n", "instance", "inequality_id", "lhs", "rhs", "epsilon", "holds", "equality_within",
           "degenerate", "proven"]


def random_composition(n, parts, rng):
    """Splits n into `parts` positive integers, uniformly over the cut positions."""
    cuts = sorted(rng.choice(range(1, n), size=parts - 1, replace=False).tolist()) if parts > 1 else []
    bounds = [0] + cuts + [n]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def random_zonotope(n, max_generators, rng):
    count = int(rng.integers(1, max_generators + 1))
    return Zonotope(rng.uniform(-1.0, 1.0, size=(count, n)))


def random_configuration(n, max_generators, rng):
    """
    Desc: Random zonotopes with random multiplicities summing to n.
    Parameters:
        n (int): Dimension.
        max_generators (int): Largest generator count per zonotope.
        rng (np.random.Generator): Source of randomness.
    returns:
    (list): (Zonotope, multiplicity) entries.
    """
    parts = int(rng.integers(1, n + 1))
    alphas = random_composition(n, parts, rng)
    return [(random_zonotope(n, max_generators, rng), a) for a in alphas]


def with_ball(entries):
    """The same configuration with the last body replaced by unit-ball copies."""
    n = entries[0][0].ambient_dim
    return entries[:-1] + [(UnitBall(n), entries[-1][1])]


def run_fuzz(count, seed=0, n_values=(2, 3, 4), generators=4, inequalities=FUZZ_INEQUALITIES,
             csv_path=None, tol=DEFAULT_TOLERANCES):
    """
    Desc: Runs every requested inequality on `count` random zonotope configurations. ZONOLATE
          uses the configuration with its last body replaced by ball copies.
    Parameters:
        count (int): Number of configurations.
        seed (int): Root seed; the same seed gives the same DataFrame.
        n_values (tuple of int): Dimensions drawn uniformly.
        generators (int): Largest generator count per zonotope.
        inequalities (tuple of str): Inequality ids to check.
        csv_path (str): Where to save the DataFrame, or None.
        tol (Tolerances): Tolerances.
    returns:
    (pd.DataFrame): One row per (configuration, inequality).
    """
    rng = make_rng(seed)
    rows = []
    for instance in range(count):
        if instance and instance % 100 == 0:
            logger.info("fuzz: %d of %d configurations checked", instance, count)
        n = int(rng.choice(n_values))
        entries = random_configuration(n, generators, rng)
        for inequality_id in inequalities:
            target = with_ball(entries) if inequality_id == ZONOLATE else entries
            report = check(target, inequality_id, tol=tol)
            rows.append({"n": n, "instance": instance, "inequality_id": inequality_id,
                         "lhs": report.lhs, "rhs": report.rhs, "epsilon": report.epsilon,
                         "holds": report.holds, "equality_within": report.equality_within,
                         "degenerate": report.degenerate, "proven": report.proven})
    df = pd.DataFrame(rows, columns=COLUMNS)
    if csv_path is not None:
        df.to_csv(csv_path, index=False)
        logger.info("fuzz results saved to %s", csv_path)
    return df


def summarize(df):
    """Per-inequality counts of checked, holding and degenerate instances."""
    return df.groupby("inequality_id").agg(checked=("holds", "size"), holds=("holds", "sum"),
                                           degenerate=("degenerate", "sum")).reset_index()


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    results = run_fuzz(500, seed=0, csv_path="fuzz_results.csv")
    print(summarize(results).to_string(index=False))
