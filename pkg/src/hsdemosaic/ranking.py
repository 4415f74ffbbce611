"""Bradley-Terry preference scales from pairwise vote counts."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components


class DegenerateTableError(ValueError):
    """The maximum-likelihood scale does not exist for this vote table."""


@dataclass(frozen=True)
class PreferenceScale:
    pi: np.ndarray
    n_iter: int
    converged: bool


def check_vote_table(wins):
    wins = np.asarray(wins, dtype=float)
    if wins.ndim != 2 or wins.shape[0] != wins.shape[1]:
        raise ValueError(f"vote table must be square, got shape {wins.shape}")
    if not np.all(np.isfinite(wins)) or np.any(wins < 0):
        raise ValueError("vote counts must be finite and non-negative")
    if np.any(np.diag(wins) != 0):
        raise ValueError("a method cannot receive votes against itself")
    return wins


def log_likelihood(pi, wins):
    """Bradley-Terry log-likelihood ``sum_ij w_ij log(pi_i / (pi_i + pi_j))``."""
    pi = np.asarray(pi, dtype=float)
    ratio = pi[:, None] / (pi[:, None] + pi[None, :])
    mask = wins > 0
    return float(np.sum(wins[mask] * np.log(ratio[mask])))


def fit_bradley_terry(wins, max_iters=10000, tol=1e-12):
    """Maximum-likelihood worths by the minorization-maximization fixed point.

    ``wins[i, j]`` counts the votes preferring method ``i`` over ``j``.
    Each sweep applies ``pi_i <- W_i / sum_j n_ij / (pi_i + pi_j)`` to all
    methods at once and renormalizes to unit sum.
    """
    wins = check_vote_table(wins)
    k = wins.shape[0]
    totals = wins + wins.T
    won = wins.sum(axis=1)
    if k > 1 and np.any(won == 0):
        raise DegenerateTableError(f"methods {np.flatnonzero(won == 0).tolist()} never win")
    if k > 1 and connected_components(totals > 0, directed=False)[0] > 1:
        raise DegenerateTableError("comparison graph is disconnected")

    pi = np.full(k, 1.0 / k)
    converged = k == 1
    it = 0
    while not converged and it < max_iters:
        it += 1
        denom = np.sum(totals / (pi[:, None] + pi[None, :]), axis=1)
        new = won / denom
        new /= new.sum()
        converged = bool(np.max(np.abs(new - pi)) < tol)
        pi = new
    return PreferenceScale(pi=pi, n_iter=it, converged=converged)


def load_vote_table(path):
    """Read ``k`` then ``k`` rows of ``k`` integer counts."""
    tokens = Path(path).read_text().split()
    if not tokens:
        raise ValueError(f"{path}: empty vote table")
    k = int(tokens[0])
    if len(tokens) != 1 + k * k:
        raise ValueError(f"{path}: expected {k * k} counts, found {len(tokens) - 1}")
    return check_vote_table(np.array([int(t) for t in tokens[1:]]).reshape(k, k))


def save_vote_table(wins, path):
    wins = np.asarray(wins).astype(int)
    rows = "\n".join(" ".join(str(v) for v in row) for row in wins)
    Path(path).write_text(f"{wins.shape[0]}\n{rows}\n")


def pairs_to_table(k, comparisons):
    """Build a vote table from ``(i, j, wins_i, wins_j)`` tuples."""
    wins = np.zeros((k, k), dtype=int)
    for i, j, wi, wj in comparisons:
        wins[i, j] += wi
        wins[j, i] += wj
    return wins
