"""Block codes, ML decoding, adaptive schemes, and the constructions that
turn one-way codes into two-way / three-user schemes without changing what
any decoder sees.

ML decoders score candidate noise paths through the declared noise model's
count-based log-probability, so observations with identical statistics get
bit-identical scores; ties always resolve to the smallest message index
(argmax returns the first maximizer).
"""

import json

import numpy as np

from .alphabet import convolve_pmf
from .noise import IidNoise, group_log_values, grouped_log_score, noise_from_config
from .seeds import derive_rng


class EnumerationCapError(RuntimeError):
    """A requested enumeration exceeds the configured cap."""


class BlockCode:
    """Non-adaptive (n, M) code: codeword table plus a decoding rule.

    The decoder is exact ML against `noise` (the noise model of the one-way
    channel this code is meant for), or an explicit lookup table over all
    q**n received words.
    """

    def __init__(self, q, codewords, noise=None, decode_table=None):
        cw = np.asarray(codewords, dtype=np.int64)
        if cw.ndim != 2:
            raise ValueError("codewords must be an (M, n) table")
        if cw.min() < 0 or cw.max() >= q:
            raise ValueError("codeword symbols out of alphabet range")
        self.q = q
        self.codewords = cw
        self.noise = noise
        if noise is not None and noise.q != q:
            raise ValueError("decoder noise alphabet does not match the code")
        self.decode_table = None if decode_table is None else np.asarray(decode_table, dtype=np.int64)

    @property
    def n(self):
        return self.codewords.shape[1]

    @property
    def num_messages(self):
        return self.codewords.shape[0]

    @property
    def rate(self):
        return float(np.log2(self.num_messages) / self.n)

    def encode(self, m):
        return self.codewords[m].copy()

    def decode_batch(self, received):
        """ML-decode each row of a (T, n) array of received words."""
        y = np.atleast_2d(np.asarray(received, dtype=np.int64))
        if self.decode_table is not None:
            idx = np.zeros(len(y), dtype=np.int64)
            for i in range(self.n):
                idx = idx * self.q + y[:, i]
            return self.decode_table[idx]
        if self.noise is None:
            raise ValueError("code has neither an ML noise model nor a decode table")
        # chunk so the (chunk, M, n) candidate block stays a few MB
        step = max(1, int(4e6 // max(1, self.num_messages * self.n)))
        out = np.empty(len(y), dtype=np.int64)
        for lo in range(0, len(y), step):
            block = y[lo : lo + step]
            cand = (block[:, None, :] - self.codewords[None, :, :]) % self.q
            out[lo : lo + step] = np.argmax(self.noise.log_prob_paths(cand), axis=1)
        return out

    def decode(self, received):
        return int(self.decode_batch(np.asarray(received)[None, :])[0])

    def to_dict(self):
        d = {
            "q": self.q,
            "n": self.n,
            "M": self.num_messages,
            "codewords": [[int(s) for s in row] for row in self.codewords],
        }
        if self.noise is not None:
            d["noise"] = self.noise.to_config()
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        noise = noise_from_config(d["noise"]) if "noise" in d else None
        if "codewords" in d:
            code = cls(d["q"], d["codewords"], noise=noise)
        elif "seed" in d:
            rng = derive_rng(d["seed"])
            code = random_coset_code(d["q"], d["n"], d["M"], noise, rng)
        else:
            raise ValueError("codebook dict needs either 'codewords' or 'seed'")
        if code.n != d["n"] or code.num_messages != d["M"]:
            raise ValueError("codebook dimensions do not match declared n / M")
        return code

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def random_coset_code(q, n, M, noise, rng):
    """Codebook of M independently uniform codewords with an exact ML decoder."""
    if M > q**n:
        raise ValueError(f"M={M} exceeds the q^n={q**n} available sequences")
    return BlockCode(q, rng.integers(0, q, size=(M, n)), noise=noise)


def coset_code_from_seed(seed, q, n, M, noise):
    """Deterministic regeneration used by the {'seed', 'q', 'n', 'M'} form."""
    return random_coset_code(q, n, M, noise, derive_rng(seed))


class AdaptiveScheme:
    """Per-time encoders f_i(message, received history) plus a terminal decoder.

    num_messages is an int, or an (M_a, M_b) pair for a user carrying two
    messages. decode(own_message, received_block) returns whatever this user
    is supposed to reconstruct. Non-adaptive instances ignore the history
    argument and expose their codeword table.
    """

    def __init__(self, q, n, num_messages, encode_step, decode, is_adaptive=True, codewords=None, decode_batch=None):
        self.q = q
        self.n = n
        self.num_messages = num_messages
        self._encode_step = encode_step
        self._decode = decode
        self.is_adaptive = is_adaptive
        self.codewords = codewords
        self._decode_batch = decode_batch

    def encode_step(self, message, history):
        """Channel input for time len(history)+1, given own received past."""
        return self._encode_step(message, history)

    def decode(self, message, received):
        return self._decode(message, received)

    def decode_batch(self, messages, received):
        """Vectorized decode; only non-adaptive schemes provide this."""
        if self._decode_batch is None:
            raise NotImplementedError("no batch decoder for this scheme")
        return self._decode_batch(messages, received)


def lift_nonadaptive(code, q=None):
    """Wrap a block code (or a fixed input sequence) as a history-blind scheme.

    For a bare symbol sequence the alphabet size q must be given unless the
    sequence itself exhibits it.
    """
    if isinstance(code, BlockCode):
        cw = code.codewords
        return AdaptiveScheme(
            code.q,
            code.n,
            code.num_messages,
            encode_step=lambda w, hist: int(cw[w, len(hist)]),
            decode=lambda w, y: code.decode(y),
            is_adaptive=False,
            codewords=cw,
            decode_batch=lambda ws, Y: code.decode_batch(Y),
        )
    seq = np.asarray(code, dtype=np.int64)
    return AdaptiveScheme(
        int(seq.max(initial=0)) + 1 if q is None else q,
        len(seq),
        1,
        encode_step=lambda w, hist: int(seq[len(hist)]),
        decode=lambda w, y: 0,
        is_adaptive=False,
        codewords=seq[None, :],
    )


def compose_2twc(code1, code2):
    """Build the two-way scheme pair from two one-way block codes.

    User j transmits its own codeword; each user subtracts that known
    codeword from its received block and feeds the difference to the other
    link's decoder. On the same noise path the decoder input is identical to
    the one-way channel's output, symbol for symbol.
    """
    if code1.q != code2.q or code1.n != code2.n:
        raise ValueError("component codes must share (q, n)")
    q, n = code1.q, code1.n
    cw1, cw2 = code1.codewords, code2.codewords

    scheme1 = AdaptiveScheme(
        q,
        n,
        code1.num_messages,
        encode_step=lambda w, hist: int(cw1[w, len(hist)]),
        decode=lambda w1, y1: code2.decode((np.asarray(y1) - cw1[w1]) % q),
        is_adaptive=False,
        codewords=cw1,
        decode_batch=lambda w1s, Y1: code2.decode_batch((Y1 - cw1[w1s]) % q),
    )
    scheme2 = AdaptiveScheme(
        q,
        n,
        code2.num_messages,
        encode_step=lambda w, hist: int(cw2[w, len(hist)]),
        decode=lambda w2, y2: code1.decode((np.asarray(y2) - cw2[w2]) % q),
        is_adaptive=False,
        codewords=cw2,
        decode_batch=lambda w2s, Y2: code1.decode_batch((Y2 - cw2[w2s]) % q),
    )
    return scheme1, scheme2


class MacCodePair:
    """Two codebooks toward a common receiver with an exact joint ML decoder.

    Ties resolve to the lexicographically smallest (m1, m2) pair.
    """

    def __init__(self, q, book1, book2, noise3, max_pairs=65536):
        b1 = np.asarray(book1, dtype=np.int64)
        b2 = np.asarray(book2, dtype=np.int64)
        if b1.shape[1] != b2.shape[1]:
            raise ValueError("codebooks must share the blocklength")
        if b1.shape[0] * b2.shape[0] > max_pairs:
            raise EnumerationCapError(
                f"joint decoder needs {b1.shape[0] * b2.shape[0]} pairs, cap is {max_pairs}"
            )
        self.q = q
        self.book1 = b1
        self.book2 = b2
        self.noise3 = noise3
        self._sums = (b1[:, None, :] + b2[None, :, :]).reshape(-1, b1.shape[1]) % q

    @property
    def n(self):
        return self.book1.shape[1]

    @property
    def M1(self):
        return self.book1.shape[0]

    @property
    def M2(self):
        return self.book2.shape[0]

    def decode_joint_batch(self, received):
        y = np.atleast_2d(np.asarray(received, dtype=np.int64))
        cand = (y[:, None, :] - self._sums[None, :, :]) % self.q
        best = np.argmax(self.noise3.log_prob_paths(cand), axis=1)
        return best // self.M2, best % self.M2

    def decode_joint(self, received):
        m1, m2 = self.decode_joint_batch(np.asarray(received)[None, :])
        return int(m1[0]), int(m2[0])


def mac_joint_ml_code(q, n, M1, M2, noise3, rng, max_pairs=65536):
    """Independent uniform codebooks for the two senders + joint ML decoding."""
    book1 = rng.integers(0, q, size=(M1, n))
    book2 = rng.integers(0, q, size=(M2, n))
    return MacCodePair(q, book1, book2, noise3, max_pairs=max_pairs)


class DbcCode:
    """Superposition code for the two-receiver degraded additive channel.

    A cloud codeword (per coarse message) is drawn i.i.d. from p(u); the
    transmitted word is drawn per-symbol from p(x3 | u). The strong receiver
    (noise z1) runs joint ML over (fine, coarse) pairs and keeps the fine
    index; the weak receiver (noise z1 then z2) runs ML over cloud words
    through the averaged per-symbol channel u -> y.
    """

    def __init__(self, q, cloud, satellite, pmf_z1, pmf_z2, p_x3_given_u):
        self.q = q
        self.cloud = np.asarray(cloud, dtype=np.int64)  # (M32, n), U-alphabet
        self.satellite = np.asarray(satellite, dtype=np.int64)  # (M31, M32, n)
        self.pmf_z1 = pmf_z1
        self.pmf_z2 = pmf_z2
        z12 = convolve_pmf(pmf_z1, pmf_z2).probs
        self._z1_model = IidNoise(pmf_z1)
        rows = np.asarray(p_x3_given_u, dtype=float)
        # averaged weak-receiver channel: W[u, y] = sum_x p(x|u) * z12[(y-x) mod q]
        idx = (np.arange(q)[:, None] - np.arange(q)[None, :]) % q  # (y, x) -> y-x
        W = rows @ z12[idx].T
        self._groupW, self._glogW = group_log_values(W)
        self._flat = self.satellite.reshape(-1, self.satellite.shape[2])

    @property
    def n(self):
        return self.satellite.shape[2]

    @property
    def M31(self):
        return self.satellite.shape[0]

    @property
    def M32(self):
        return self.satellite.shape[1]

    def codeword(self, w31, w32):
        return self.satellite[w31, w32]

    def decode1_batch(self, received):
        """Strong receiver: fine message via joint ML over all pairs."""
        y = np.atleast_2d(np.asarray(received, dtype=np.int64))
        cand = (y[:, None, :] - self._flat[None, :, :]) % self.q
        best = np.argmax(self._z1_model.log_prob_paths(cand), axis=1)
        return best // self.M32

    def decode2_batch(self, received):
        """Weak receiver: coarse message via ML over cloud words."""
        y = np.atleast_2d(np.asarray(received, dtype=np.int64))
        pair = self.cloud[None, :, :] * self.q + y[:, None, :]  # (T, M32, n)
        return np.argmax(grouped_log_score(self._groupW.ravel(), self._glogW, pair), axis=1)

    def decode1(self, received):
        return int(self.decode1_batch(np.asarray(received)[None, :])[0])

    def decode2(self, received):
        return int(self.decode2_batch(np.asarray(received)[None, :])[0])


def superposition_dbc_code(q, n, M31, M32, aux_p_u, aux_rows, pmf_z1, pmf_z2, rng):
    """Draw a superposition codebook from (p(u), p(x3|u)).

    aux_p_u is the cloud symbol law (length u_card), aux_rows the
    (u_card, q) conditional table.
    """
    p_u = np.asarray(aux_p_u, dtype=float)
    rows = np.asarray(aux_rows, dtype=float)
    cum_u = np.cumsum(p_u)
    cum_rows = np.cumsum(rows, axis=1)
    cloud = (cum_u <= rng.random((M32, n))[..., None]).sum(axis=-1)
    u = rng.random((M31, M32, n))
    satellite = (cum_rows[cloud][None, ...] <= u[..., None]).sum(axis=-1)
    return DbcCode(q, cloud, satellite, pmf_z1, pmf_z2, rows)


def compose_madbc(mac, dbc):
    """Build the three MA/DBC schemes from a MAC code pair and a DBC code.

    Every user transmits a codeword of its own message(s) and subtracts that
    codeword from its received block before decoding, so each decoder sees
    exactly its one-way channel output on the same noise path.
    """
    if not (mac.q == dbc.q and mac.n == dbc.n):
        raise ValueError("MAC and DBC components must share (q, n)")
    q, n = mac.q, mac.n
    b1, b2 = mac.book1, mac.book2

    scheme1 = AdaptiveScheme(
        q,
        n,
        mac.M1,
        encode_step=lambda w13, hist: int(b1[w13, len(hist)]),
        decode=lambda w13, y1: dbc.decode1((np.asarray(y1) - b1[w13]) % q),
        is_adaptive=False,
        codewords=b1,
        decode_batch=lambda ws, Y1: dbc.decode1_batch((Y1 - b1[ws]) % q),
    )
    scheme2 = AdaptiveScheme(
        q,
        n,
        mac.M2,
        encode_step=lambda w23, hist: int(b2[w23, len(hist)]),
        decode=lambda w23, y2: dbc.decode2((np.asarray(y2) - b2[w23]) % q),
        is_adaptive=False,
        codewords=b2,
        decode_batch=lambda ws, Y2: dbc.decode2_batch((Y2 - b2[ws]) % q),
    )
    scheme3 = AdaptiveScheme(
        q,
        n,
        (dbc.M31, dbc.M32),
        encode_step=lambda w, hist: int(dbc.satellite[w[0], w[1], len(hist)]),
        decode=lambda w, y3: mac.decode_joint((np.asarray(y3) - dbc.satellite[w[0], w[1]]) % q),
        is_adaptive=False,
        codewords=dbc.satellite,
    )
    return scheme1, scheme2, scheme3


def delayed_copy_feedback_scheme(n):
    """Binary adaptive scheme that defeats the delayed-copy noise pair.

    User 1 sends each fresh bit plus its own previous input and previous
    received symbol; user 2 stays silent and reads the bits straight off its
    received block. The echoed noise cancels, so user 2 receives the message
    bits exactly: rate pair (1, 0) with zero error on DelayedCopyPair noise.
    Message w encodes bits little-endian: bit i of w is sent at time i+1.
    """

    def encode1(w, hist):
        x = 0
        for k in range(len(hist) + 1):
            yprev = hist[k - 1] if k >= 1 else 0
            x = (((w >> k) & 1) + x + yprev) % 2
        return x

    def decode2(_w2, y2):
        return sum(int(b) << i for i, b in enumerate(y2))

    scheme1 = AdaptiveScheme(
        2, n, 1 << n, encode_step=encode1, decode=lambda w, y1: 0, is_adaptive=True
    )
    scheme2 = AdaptiveScheme(
        2, n, 1, encode_step=lambda w, hist: 0, decode=decode2, is_adaptive=False
    )
    return scheme1, scheme2
