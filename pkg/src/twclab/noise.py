"""Stationary noise processes: i.i.d., finite-state Markov, and a correlated
delayed-copy pair, each with exact entropy rates and seeded path sampling.

Paths are plain integer numpy arrays. Log-probabilities of paths are computed
from symbol / transition counts so that observations with identical
statistics receive bit-identical scores (this makes maximum-likelihood
tie-breaking deterministic downstream).
"""

import itertools
import math

import numpy as np

from .alphabet import Pmf, entropy, entropy_vec

LOG_ZERO = -1e18  # stand-in for log2(0); keeps count @ logp free of NaNs


class NotErgodicError(ValueError):
    """Transition matrix is reducible or periodic."""


def group_log_values(probs):
    """Map probabilities to (group index per entry, log2 per group).

    Scores computed as sum_g count_g * log2(value_g) over the distinct
    probability values are bit-identical for observations whose statistics
    are equal as value multisets, which keeps ML tie-breaking deterministic
    (a flat per-cell dot product would split such ties by summation order).
    """
    flat = np.asarray(probs, dtype=float).ravel()
    uniq, inv = np.unique(flat, return_inverse=True)
    glog = np.where(uniq > 0, np.log2(np.maximum(uniq, 1e-300)), LOG_ZERO)
    return inv.reshape(np.shape(probs)), glog


def grouped_log_score(group_of, glog, idx):
    """sum of log2 values over idx (last axis), accumulated per value group."""
    g = group_of[idx]
    score = np.zeros(g.shape[:-1])
    for gi in range(len(glog)):
        score += (g == gi).sum(axis=-1) * glog[gi]
    return score


class InsufficientDataError(ValueError):
    """Too few samples per context for a plug-in entropy estimate."""


def _inv_cdf(cum, u):
    """Inverse-cdf sampling: index of first cdf entry exceeding u.

    cum has the cdf along its last axis; u broadcasts against the leading
    axes. Zero-probability symbols (repeated cdf values) are never selected.
    """
    return (cum <= u[..., None]).sum(axis=-1)


class IidNoise:
    """Memoryless noise with a fixed marginal pmf."""

    def __init__(self, pmf):
        if not isinstance(pmf, Pmf):
            pmf = Pmf(pmf)
        self.pmf = pmf
        self._cum = np.cumsum(pmf.probs)
        self._group, self._glog = group_log_values(pmf.probs)

    @property
    def q(self):
        return self.pmf.q

    def entropy_rate(self):
        return entropy(self.pmf)

    def sample_paths(self, trials, n, rng):
        u = rng.random((trials, n))
        return _inv_cdf(self._cum, u)

    def sample_path(self, n, rng):
        return self.sample_paths(1, n, rng)[0]

    def log_prob_paths(self, paths):
        """log2-probability of each path; paths has shape (..., n)."""
        return grouped_log_score(self._group, self._glog, np.asarray(paths))

    def enumerate_paths(self, n):
        """All q**n length-n paths with their probabilities."""
        paths = np.array(list(itertools.product(range(self.q), repeat=n)), dtype=int).reshape(-1, n)
        probs = self.pmf.probs[paths].prod(axis=1)
        return paths, probs

    def to_config(self):
        return {"kind": "iid", "q": self.q, "pmf": [float(x) for x in self.pmf.probs]}


def stationary_distribution(transition):
    """Unique stationary law of an irreducible aperiodic row-stochastic matrix.

    Raises NotErgodicError when the positive-support graph is not strongly
    connected or has period > 1.
    """
    P = np.asarray(transition, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    q = P.shape[0]
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
        raise ValueError("rows must be probability vectors (tolerance 1e-12)")

    A = P > 0
    reach = (A | np.eye(q, dtype=bool)).astype(np.int64)
    for _ in range(max(1, int(np.ceil(np.log2(q))) + 1)):
        reach = np.minimum(reach @ reach, 1)
    if not reach.all():
        raise NotErgodicError("chain is reducible")

    # period = gcd of (level[u] + 1 - level[v]) over edges, via BFS levels
    level = np.full(q, -1)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            for t in np.flatnonzero(A[s]):
                if level[t] < 0:
                    level[t] = level[s] + 1
                    nxt.append(t)
        frontier = nxt
    g = 0
    for s in range(q):
        for t in np.flatnonzero(A[s]):
            g = math.gcd(g, int(level[s]) + 1 - int(level[t]))
    if g != 1:
        raise NotErgodicError(f"chain is periodic with period {g}")

    if (P.sum(axis=0) == 1.0).all():
        # doubly stochastic: exactly uniform (avoids ulp asymmetry from the solver)
        return Pmf(np.full(q, 1.0 / q))
    M = P.T - np.eye(q)
    M[-1, :] = 1.0
    b = np.zeros(q)
    b[-1] = 1.0
    pi = np.linalg.solve(M, b)
    pi = np.maximum(pi, 0.0)
    pi = pi / pi.sum()
    if np.max(np.abs(pi @ P - pi)) > 1e-10:
        raise ValueError("stationary solve failed residual check")
    return Pmf(pi)


class MarkovNoise:
    """Order-1 stationary ergodic Markov noise, started in its stationary law."""

    def __init__(self, transition):
        P = np.asarray(transition, dtype=float)
        self.stationary = stationary_distribution(P)
        P = P.copy()
        P.flags.writeable = False
        self.transition = P
        self._cum_rows = np.cumsum(P, axis=1)
        self._cum_pi = np.cumsum(self.stationary.probs)
        self._logpi = np.where(
            self.stationary.probs > 0,
            np.log2(np.maximum(self.stationary.probs, 1e-300)),
            LOG_ZERO,
        )
        self._groupT, self._glogT = group_log_values(P.ravel())

    @property
    def q(self):
        return self.transition.shape[0]

    def entropy_rate(self):
        """Sum over states of pi(s) * H(row_s), in bits."""
        return float(sum(p * entropy_vec(row) for p, row in zip(self.stationary.probs, self.transition)))

    def sample_paths(self, trials, n, rng):
        u = rng.random((trials, n))
        out = np.empty((trials, n), dtype=np.int64)
        out[:, 0] = _inv_cdf(self._cum_pi, u[:, 0])
        for i in range(1, n):
            out[:, i] = _inv_cdf(self._cum_rows[out[:, i - 1]], u[:, i])
        return out

    def sample_path(self, n, rng):
        return self.sample_paths(1, n, rng)[0]

    def log_prob_paths(self, paths):
        """Chain-rule log2-probability from initial state + transition counts."""
        z = np.asarray(paths)
        score = self._logpi[z[..., 0]]
        if z.shape[-1] > 1:
            pair = z[..., :-1] * self.q + z[..., 1:]
            score = score + grouped_log_score(self._groupT, self._glogT, pair)
        return score

    def enumerate_paths(self, n):
        paths = np.array(list(itertools.product(range(self.q), repeat=n)), dtype=int).reshape(-1, n)
        probs = self.stationary.probs[paths[:, 0]].copy()
        for i in range(1, n):
            probs *= self.transition[paths[:, i - 1], paths[:, i]]
        return paths, probs

    def to_config(self):
        return {
            "kind": "markov",
            "q": self.q,
            "transition": [[float(x) for x in row] for row in self.transition],
        }


class DelayedCopyPair:
    """Binary correlated noise pair: Z1 i.i.d. uniform, Z2 its unit delay.

    The delayed stream starts from the zero boundary symbol, so
    z2[0] = 0 and z2[i] = z1[i-1] for i >= 1, exactly.
    """

    q = 2

    def marginal_entropy_rates(self):
        return (1.0, 1.0)

    def sample_pairs(self, trials, n, rng):
        z1 = (rng.random((trials, n)) < 0.5).astype(np.int64)
        z2 = np.zeros_like(z1)
        z2[:, 1:] = z1[:, :-1]
        return z1, z2

    def sample_pair(self, n, rng):
        z1, z2 = self.sample_pairs(1, n, rng)
        return z1[0], z2[0]

    def enumerate_pairs(self, n):
        """All 2**n equiprobable (z1, z2) path pairs."""
        z1 = np.array(list(itertools.product((0, 1), repeat=n)), dtype=int).reshape(-1, n)
        z2 = np.zeros_like(z1)
        z2[:, 1:] = z1[:, :-1]
        probs = np.full(len(z1), 0.5**n)
        return z1, z2, probs

    def to_config(self):
        return {"kind": "delayed_copy", "q": 2}


def sample_path(model, n, rng):
    """Length-n realization of a noise model.

    i.i.d. models draw independently from their pmf; Markov models start in
    the stationary law and step through the transition rows; a
    DelayedCopyPair returns its coupled (z1, z2) pair of paths.
    """
    if n < 1:
        raise ValueError("path length must be >= 1")
    if isinstance(model, DelayedCopyPair):
        return model.sample_pair(n, rng)
    return model.sample_path(n, rng)


def entropy_rate(model):
    """Exact per-symbol entropy rate of a noise model, in bits.

    For a DelayedCopyPair the two marginal rates are returned as a tuple
    (both equal log2(2) = 1).
    """
    if isinstance(model, DelayedCopyPair):
        return model.marginal_entropy_rates()
    return model.entropy_rate()


def empirical_entropy_rate(path, context_order, q=None, min_context_count=10):
    """Plug-in estimate of H(Z_i | previous `context_order` symbols) in bits.

    Every context that occurs must occur at least `min_context_count` times,
    otherwise InsufficientDataError is raised.
    """
    z = np.asarray(path, dtype=int)
    m = int(context_order)
    if m < 0:
        raise ValueError("context order must be >= 0")
    if q is None:
        q = int(z.max()) + 1 if z.size else 2
    if z.size <= m:
        raise InsufficientDataError(f"path of length {z.size} too short for order {m}")

    ctx = np.zeros(z.size - m, dtype=np.int64)
    for j in range(m):
        ctx = ctx * q + z[j : z.size - m + j]
    counts = np.zeros((q**m, q))
    np.add.at(counts, (ctx, z[m:]), 1.0)

    row_sums = counts.sum(axis=1)
    occupied = row_sums > 0
    if np.any(row_sums[occupied] < min_context_count):
        raise InsufficientDataError(
            f"some contexts occur fewer than {min_context_count} times"
        )
    total = row_sums.sum()
    h = 0.0
    for s, row in zip(row_sums[occupied], counts[occupied]):
        h += (s / total) * entropy_vec(row / s)
    return float(h)


def noise_from_config(cfg):
    """Build a noise model from its JSON-style config dict."""
    kind = cfg.get("kind")
    if kind == "iid":
        model = IidNoise(Pmf(cfg["pmf"]))
    elif kind == "markov":
        model = MarkovNoise(cfg["transition"])
    elif kind == "delayed_copy":
        model = DelayedCopyPair()
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    if "q" in cfg and model.q != cfg["q"]:
        raise ValueError(f"noise config q={cfg['q']} does not match model alphabet {model.q}")
    return model
