"""Modulo-q symbol arithmetic and information functionals on finite alphabets.

Symbols are plain integers in {0, ..., q-1}; all entropies and mutual
informations are in bits (log base 2), with the convention 0*log(0) = 0.
"""

import json

import numpy as np

_NORM_TOL = 1e-12


def _check_symbol(a, q):
    if q < 2:
        raise ValueError(f"alphabet size must be >= 2, got {q}")
    if not (0 <= a < q):
        raise ValueError(f"symbol {a} out of range for alphabet size {q}")


def mod_add(a, b, q):
    """Sum of two symbols under modulo-q addition."""
    _check_symbol(a, q)
    _check_symbol(b, q)
    return (a + b) % q


def mod_sub(a, b, q):
    """Difference (a - b) mod q; inverse of mod_add in its second argument."""
    _check_symbol(a, q)
    _check_symbol(b, q)
    return (a - b) % q


class Pmf:
    """Probability mass function on the alphabet {0, ..., q-1}.

    Entries must be nonnegative and sum to 1 within 1e-12; the vector is
    renormalized exactly once at construction and then frozen (the
    underlying array is read-only).
    """

    __slots__ = ("_probs",)

    def __init__(self, probs):
        arr = np.asarray(probs, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("pmf must be a 1-D vector of length >= 2")
        if np.any(arr < 0):
            raise ValueError("pmf entries must be nonnegative")
        s = float(arr.sum())
        if abs(s - 1.0) > _NORM_TOL:
            raise ValueError(f"pmf sums to {s!r}, outside tolerance {_NORM_TOL}")
        arr = arr / s
        arr.flags.writeable = False
        self._probs = arr

    @property
    def q(self):
        return self._probs.size

    @property
    def probs(self):
        return self._probs

    @classmethod
    def uniform(cls, q):
        return cls(np.full(q, 1.0 / q))

    @classmethod
    def point_mass(cls, value, q):
        _check_symbol(value, q)
        p = np.zeros(q)
        p[value] = 1.0
        return cls(p)

    @classmethod
    def bernoulli(cls, p):
        """Binary pmf with P(1) = p."""
        return cls([1.0 - p, p])

    def to_dict(self):
        return {"q": self.q, "probs": [float(x) for x in self._probs]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        p = cls(d["probs"])
        if p.q != d["q"]:
            raise ValueError("pmf length does not match declared q")
        return p

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))

    def __repr__(self):
        return f"Pmf({list(self._probs)})"

    def __len__(self):
        return self.q


def entropy_vec(p):
    """Entropy in bits of a raw probability vector (need not be a Pmf)."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def entropy(p):
    """Shannon entropy of a Pmf in bits; 0 <= H(p) <= log2(q)."""
    return entropy_vec(p.probs if isinstance(p, Pmf) else p)


def _cyclic_index(q):
    # idx[i, j] = (i - j) mod q, so that conv[i] = sum_j p[j] * r[idx[i, j]]
    i = np.arange(q)
    return (i[:, None] - i[None, :]) % q


def convolve_vec(p, r):
    """Cyclic (mod-q) convolution of two raw probability vectors."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape != r.shape:
        raise ValueError("convolution requires matching alphabet sizes")
    return r[_cyclic_index(p.size)] @ p


def convolve_pmf(p, r):
    """Distribution of the modulo-q sum of independent draws from p and r."""
    if p.q != r.q:
        raise ValueError(f"alphabet mismatch: {p.q} vs {r.q}")
    return Pmf(convolve_vec(p.probs, r.probs))


def conditional_mutual_information(joint):
    """I(X;Y|U) in bits from a joint table p[u, x, y].

    Accepts any array-like of shape (|U|, |X|, |Y|) summing to 1.
    Computed as sum_u p(u) * I(X;Y | U=u); slices with p(u) = 0 are skipped.
    The result is clipped at 0 to absorb float round-off.
    """
    p = np.asarray(joint, dtype=float)
    if p.ndim != 3:
        raise ValueError("joint table must have shape (|U|, |X|, |Y|)")
    if np.any(p < 0):
        raise ValueError("joint table entries must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"joint table sums to {p.sum()!r}, expected 1")

    total = 0.0
    pu = p.sum(axis=(1, 2))
    for u in range(p.shape[0]):
        if pu[u] <= 0:
            continue
        pxy = p[u] / pu[u]
        hx = entropy_vec(pxy.sum(axis=1))
        hy = entropy_vec(pxy.sum(axis=0))
        hxy = entropy_vec(pxy.ravel())
        total += pu[u] * (hx + hy - hxy)
    return max(0.0, float(total))
