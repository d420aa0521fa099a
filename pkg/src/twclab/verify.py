"""Monte Carlo harness, pathwise coupled-equivalence testing of the
composition constructions, and exhaustive adaptive-vs-nonadaptive code
search at tiny blocklengths.

Trials are processed in shards; shard b of master seed s draws from
derive_rng(s, b), so reports are replay-deterministic and independent of the
worker count. Coupled tests run the one-way systems and the composed
two-way system on the identical noise realization and count any trial where
a reconstruction differs; a small audit slice of every run is additionally
pushed through the step-by-step channel executor and must agree with the
vectorized evaluation exactly.
"""

import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import MaDbcChannel, TwoWayChannel, run_2twc, run_madbc
from .coding import EnumerationCapError, compose_2twc, compose_madbc, random_coset_code
from .noise import DelayedCopyPair, IidNoise
from .seeds import derive_rng

_Z95 = 1.959963984540054


def wilson_interval(errors, trials, z=_Z95):
    """(rate, 95% half-width) via the Wilson score interval; sane at 0 counts."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return center, half


@dataclass
class TrialReport:
    trials: int
    errors: dict  # link label -> error count
    seed: int
    mismatch_count: int = None
    meta: dict = field(default_factory=dict)

    @property
    def error_rates(self):
        out = {}
        for link, k in self.errors.items():
            center, half = wilson_interval(k, self.trials)
            out[link] = {"rate": k / self.trials, "wilson_center": center, "ci95_half_width": half}
        return out

    def to_dict(self):
        d = {
            "trials": self.trials,
            "seed": self.seed,
            "errors": dict(self.errors),
            "error_rates": self.error_rates,
        }
        if self.mismatch_count is not None:
            d["mismatch_count"] = self.mismatch_count
        if self.meta:
            d["meta"] = dict(self.meta)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self):
        lines = ["link,errors,trials,error_rate,ci95_half_width"]
        for link in sorted(self.errors):
            k = self.errors[link]
            _, half = wilson_interval(k, self.trials)
            lines.append(f"{link},{k},{self.trials},{k / self.trials!r},{half!r}")
        if self.mismatch_count is not None:
            lines.append(f"mismatch,{self.mismatch_count},{self.trials},"
                         f"{self.mismatch_count / self.trials!r},")
        return "\n".join(lines) + "\n"


def _shards(trials, shard_size):
    return [(b, min(shard_size, trials - b * shard_size)) for b in range((trials + shard_size - 1) // shard_size)]


def _run_sharded(fn, trials, shard_size, workers):
    shards = _shards(trials, shard_size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda s: fn(*s), shards))
    else:
        results = [fn(*s) for s in shards]
    return results


def _draw_messages(rng, count, size):
    """Uniform messages; message sets beyond 2^63 must be powers of two."""
    if count <= 2**63:
        return rng.integers(0, count, size=size)
    nbits = count.bit_length() - 1
    if 1 << nbits != count:
        raise ValueError("huge message sets are only supported at powers of two")
    bits = rng.integers(0, 2, size=(size, nbits))
    return [sum(int(b) << i for i, b in enumerate(row)) for row in bits]


def monte_carlo(channel, schemes, trials, seed, shard_size=4096, workers=1):
    """Average error per link over independent trials with fresh noise.

    Messages are uniform and independent; schemes run through the causal
    channel executor unless every scheme is non-adaptive with a batch
    decoder, in which case an equivalent vectorized path is used (and the
    first trials of shard 0 are cross-checked against the executor).
    """
    if isinstance(channel, TwoWayChannel):
        return _monte_carlo_2twc(channel, schemes, trials, seed, shard_size, workers)
    if isinstance(channel, MaDbcChannel):
        return _monte_carlo_madbc(channel, schemes, trials, seed, shard_size, workers)
    raise TypeError(f"unknown channel type {type(channel)!r}")


def _monte_carlo_2twc(channel, schemes, trials, seed, shard_size, workers):
    s1, s2 = schemes
    n = s1.n
    fast = (
        not s1.is_adaptive
        and not s2.is_adaptive
        and s1.codewords is not None
        and s2.codewords is not None
        and s1._decode_batch is not None
        and s2._decode_batch is not None
    )

    def shard(b, size):
        rng = derive_rng(seed, b)
        w1 = _draw_messages(rng, s1.num_messages, size)
        w2 = _draw_messages(rng, s2.num_messages, size)
        z1, z2 = channel.sample_noise_batch(size, n, rng)
        if fast:
            x1 = s1.codewords[w1]
            x2 = s2.codewords[w2]
            y1 = (x1 + x2 + z1) % channel.q
            y2 = (x1 + x2 + z2) % channel.q
            what2 = s1.decode_batch(w1, y1)
            what1 = s2.decode_batch(w2, y2)
            e1 = int((what1 != w1).sum())
            e2 = int((what2 != w2).sum())
            if b == 0:
                _audit_2twc(channel, s1, s2, w1, w2, z1, z2, what1, what2)
        else:
            e1 = e2 = 0
            for t in range(size):
                tr = run_2twc(channel, s1, s2, _as_msg(w1[t]), _as_msg(w2[t]), (z1[t], z2[t]))
                e1 += tr.reconstructions["what1"] != _as_msg(w1[t])
                e2 += tr.reconstructions["what2"] != _as_msg(w2[t])
        return {"w1_at_user2": e1, "w2_at_user1": e2}

    totals = {"w1_at_user2": 0, "w2_at_user1": 0}
    for res in _run_sharded(shard, trials, shard_size, workers):
        for k, v in res.items():
            totals[k] += v
    return TrialReport(trials=trials, errors=totals, seed=seed)


def _as_msg(w):
    return int(w) if not isinstance(w, tuple) else w


def _audit_2twc(channel, s1, s2, w1, w2, z1, z2, what1, what2, limit=8):
    cap = min(limit, len(z1))
    for t in range(cap):
        tr = run_2twc(channel, s1, s2, _as_msg(w1[t]), _as_msg(w2[t]), (z1[t], z2[t]))
        tr.verify_equations()
        if tr.reconstructions["what1"] != int(what1[t]) or tr.reconstructions["what2"] != int(what2[t]):
            raise RuntimeError("vectorized evaluation disagrees with the channel executor")


def _monte_carlo_madbc(channel, schemes, trials, seed, shard_size, workers):
    s1, s2, s3 = schemes
    n = s1.n

    def shard(b, size):
        rng = derive_rng(seed, b)
        w13 = _draw_messages(rng, s1.num_messages, size)
        w23 = _draw_messages(rng, s2.num_messages, size)
        w31 = _draw_messages(rng, s3.num_messages[0], size)
        w32 = _draw_messages(rng, s3.num_messages[1], size)
        z1, z2, z3 = channel.sample_noise_batch(size, n, rng)
        e3 = e31 = e32 = 0
        for t in range(size):
            tr = run_madbc(
                channel,
                (s1, s2, s3),
                (int(w13[t]), int(w23[t]), int(w31[t]), int(w32[t])),
                (z1[t], z2[t], z3[t]),
            )
            r = tr.reconstructions
            e3 += (r["what13"], r["what23"]) != (int(w13[t]), int(w23[t]))
            e31 += r["what31"] != int(w31[t])
            e32 += r["what32"] != int(w32[t])
        return {"w13w23_at_user3": e3, "w31_at_user1": e31, "w32_at_user2": e32}

    totals = {"w13w23_at_user3": 0, "w31_at_user1": 0, "w32_at_user2": 0}
    for res in _run_sharded(shard, trials, shard_size, workers):
        for k, v in res.items():
            totals[k] += v
    return TrialReport(trials=trials, errors=totals, seed=seed)


def coupled_equivalence(code1, code2, trials, seed, negative_control=False, shard_size=4096, workers=1, audit_trials=8):
    """Pathwise comparison of the composed two-way scheme with its one-way parts.

    Per trial, the two one-way channels and the composed two-way system run
    on the same messages and the same noise paths; mismatch_count is the
    number of trials where any reconstruction differs. negative_control
    deliberately corrupts the composition's subtraction (off by one symbol)
    to prove the harness can see differences.
    """
    if code1.noise is None or code2.noise is None:
        raise ValueError("component codes need declared noise models")
    q, n = code1.q, code1.n
    channel = TwoWayChannel((code2.noise, code1.noise))  # z1 hits user 1, z2 hits user 2
    cs1, cs2 = compose_2twc(code1, code2)

    def shard(b, size):
        rng = derive_rng(seed, b)
        w1 = rng.integers(0, code1.num_messages, size=size)
        w2 = rng.integers(0, code2.num_messages, size=size)
        z1, z2 = channel.sample_noise_batch(size, n, rng)
        x1 = code1.codewords[w1]
        x2 = code2.codewords[w2]
        # one-way runs on the same noise paths
        ow1 = code1.decode_batch((x1 + z2) % q)
        ow2 = code2.decode_batch((x2 + z1) % q)
        # composed two-way run
        y1 = (x1 + x2 + z1) % q
        y2 = (x1 + x2 + z2) % q
        sub2 = (y2 - x2) % q
        if negative_control:  # off-by-one subtraction at the first symbol
            sub2[:, 0] = (sub2[:, 0] + 1) % q
        tw1 = code1.decode_batch(sub2)
        tw2 = code2.decode_batch((y1 - x1) % q)
        mism = int(((ow1 != tw1) | (ow2 != tw2)).sum())
        if b == 0 and not negative_control:
            _audit_2twc(channel, cs1, cs2, w1, w2, z1, z2, tw1, tw2, limit=audit_trials)
        return {
            "mismatch": mism,
            "w1_at_user2": int((tw1 != w1).sum()),
            "w2_at_user1": int((tw2 != w2).sum()),
        }

    totals = {"mismatch": 0, "w1_at_user2": 0, "w2_at_user1": 0}
    for res in _run_sharded(shard, trials, shard_size, workers):
        for k, v in res.items():
            totals[k] += v
    mism = totals.pop("mismatch")
    return TrialReport(trials=trials, errors=totals, seed=seed, mismatch_count=mism)


def coupled_equivalence_madbc(mac, dbc, trials, seed, negative_control=False, shard_size=4096, workers=1, audit_trials=8):
    """MA/DBC version of the coupled test: all three links must agree pathwise."""
    if mac.q != dbc.q or mac.n != dbc.n:
        raise ValueError("MAC and DBC components must share (q, n)")
    q, n = mac.q, mac.n
    channel = MaDbcChannel(IidNoise(dbc.pmf_z1), IidNoise(dbc.pmf_z2), mac.noise3)
    schemes = compose_madbc(mac, dbc)

    def shard(b, size):
        rng = derive_rng(seed, b)
        w13 = rng.integers(0, mac.M1, size=size)
        w23 = rng.integers(0, mac.M2, size=size)
        w31 = rng.integers(0, dbc.M31, size=size)
        w32 = rng.integers(0, dbc.M32, size=size)
        z1, z2, z3 = channel.sample_noise_batch(size, n, rng)
        x1 = mac.book1[w13]
        x2 = mac.book2[w23]
        x3 = dbc.satellite[w31, w32]
        # one-way runs
        o13, o23 = mac.decode_joint_batch((x1 + x2 + z3) % q)
        o31 = dbc.decode1_batch((x3 + z1) % q)
        o32 = dbc.decode2_batch((x3 + z1 + z2) % q)
        # composed run
        y1 = (x1 + x3 + z1) % q
        y2 = (x2 + x3 + z1 + z2) % q
        y3 = (x1 + x2 + x3 + z3) % q
        sub3 = (y3 - x3) % q
        if negative_control:  # off-by-one subtraction at the first symbol
            sub3[:, 0] = (sub3[:, 0] + 1) % q
        t13, t23 = mac.decode_joint_batch(sub3)
        t31 = dbc.decode1_batch((y1 - x1) % q)
        t32 = dbc.decode2_batch((y2 - x2) % q)
        mism = int(((o13 != t13) | (o23 != t23) | (o31 != t31) | (o32 != t32)).sum())
        if b == 0 and not negative_control:
            _audit_madbc(channel, schemes, (w13, w23, w31, w32), (z1, z2, z3), (t13, t23, t31, t32), audit_trials)
        return {
            "mismatch": mism,
            "w13w23_at_user3": int(((t13 != w13) | (t23 != w23)).sum()),
            "w31_at_user1": int((t31 != w31).sum()),
            "w32_at_user2": int((t32 != w32).sum()),
        }

    totals = {"mismatch": 0, "w13w23_at_user3": 0, "w31_at_user1": 0, "w32_at_user2": 0}
    for res in _run_sharded(shard, trials, shard_size, workers):
        for k, v in res.items():
            totals[k] += v
    mism = totals.pop("mismatch")
    return TrialReport(trials=trials, errors=totals, seed=seed, mismatch_count=mism)


def _audit_madbc(channel, schemes, msgs, noise, batch_out, limit):
    w13, w23, w31, w32 = msgs
    z1, z2, z3 = noise
    t13, t23, t31, t32 = batch_out
    for t in range(min(limit, len(z1))):
        tr = run_madbc(
            channel,
            schemes,
            (int(w13[t]), int(w23[t]), int(w31[t]), int(w32[t])),
            (z1[t], z2[t], z3[t]),
        )
        tr.verify_equations()
        r = tr.reconstructions
        same = (
            r["what13"] == int(t13[t])
            and r["what23"] == int(t23[t])
            and r["what31"] == int(t31[t])
            and r["what32"] == int(t32[t])
        )
        if not same:
            raise RuntimeError("vectorized evaluation disagrees with the channel executor")


@dataclass
class SearchResult:
    q: int
    n: int
    M1: int
    M2: int
    best_nonadaptive_error: float
    best_adaptive_error: float
    witness_nonadaptive: dict
    witness_adaptive: dict
    n_adaptive_families: int
    n_nonadaptive_families: int

    def to_dict(self):
        return {
            "q": self.q,
            "n": self.n,
            "M1": self.M1,
            "M2": self.M2,
            "best_nonadaptive_error": self.best_nonadaptive_error,
            "best_adaptive_error": self.best_adaptive_error,
            "witness_nonadaptive": self.witness_nonadaptive,
            "witness_adaptive": self.witness_adaptive,
            "n_adaptive_families": self.n_adaptive_families,
            "n_nonadaptive_families": self.n_nonadaptive_families,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _enumerate_noise_outcomes(noise_spec, n):
    """All (z1 path, z2 path, probability) triples of the joint noise law."""
    if isinstance(noise_spec, DelayedCopyPair):
        z1s, z2s, probs = noise_spec.enumerate_pairs(n)
        return [(tuple(a), tuple(b), float(p)) for a, b, p in zip(z1s, z2s, probs)]
    m1, m2 = noise_spec
    p1s, pr1 = m1.enumerate_paths(n)
    p2s, pr2 = m2.enumerate_paths(n)
    out = []
    for a, pa in zip(p1s, pr1):
        for b, pb in zip(p2s, pr2):
            out.append((tuple(a), tuple(b), float(pa * pb)))
    return out


def _encoder_families(q, M, n):
    """All deterministic per-time encoder tables for one user.

    Yields (first_step, second_step, nonadaptive) where first_step[w] is the
    time-1 symbol and second_step[w][y] the time-2 symbol given the received
    symbol y (None when n = 1).
    """
    symbols = range(q)
    if n == 1:
        for f1 in itertools.product(symbols, repeat=M):
            yield f1, None, True
        return
    rows = list(itertools.product(symbols, repeat=q))
    for f1 in itertools.product(symbols, repeat=M):
        for f2 in itertools.product(rows, repeat=M):
            nonadaptive = all(len(set(row)) == 1 for row in f2)
            yield f1, f2, nonadaptive


def _family_count(q, M, n):
    return q**M if n == 1 else q**M * q ** (M * q)


def exhaustive_code_search(noise_spec, n, M1, M2, cap=10_000_000):
    """Exact best error over every deterministic encoder family at tiny n.

    Enumerates all adaptive encoder families for both users (the
    non-adaptive families form the history-blind subclass), pairs each with
    exact MAP decoders computed from the induced joint law, and evaluates
    the exact probability that any reconstruction is wrong, by summing over
    all messages and noise realizations. q = 2 and n <= 2 only.
    """
    q = 2
    if isinstance(noise_spec, DelayedCopyPair):
        if noise_spec.q != q:
            raise ValueError("search supports q = 2 only")
    elif noise_spec[0].q != q or noise_spec[1].q != q:
        raise ValueError("search supports q = 2 only")
    if n not in (1, 2):
        raise ValueError("search supports n in {1, 2} only")

    total = _family_count(q, M1, n) * _family_count(q, M2, n)
    if total > cap:
        raise EnumerationCapError(f"{total} encoder families exceed the cap {cap}")

    outcomes = _enumerate_noise_outcomes(noise_spec, n)
    qn = q**n
    w_weight = 1.0 / (M1 * M2)

    best = {"adaptive": (2.0, None), "nonadaptive": (2.0, None)}
    for f1_first, f1_second, na1 in _encoder_families(q, M1, n):
        for f2_first, f2_second, na2 in _encoder_families(q, M2, n):
            # joint law tables: p(w_other, y_own) per own message
            acc_u2 = np.zeros((M2, qn, M1))  # user 2 sees (w2, y2), infers w1
            acc_u1 = np.zeros((M1, qn, M2))
            records = []
            for w1 in range(M1):
                for w2 in range(M2):
                    for z1, z2, pz in outcomes:
                        x1 = f1_first[w1]
                        x2 = f2_first[w2]
                        y1 = (x1 + x2 + z1[0]) % q
                        y2 = (x1 + x2 + z2[0]) % q
                        if n == 2:
                            x1b = f1_second[w1][y1]
                            x2b = f2_second[w2][y2]
                            y1 = y1 * q + (x1b + x2b + z1[1]) % q
                            y2 = y2 * q + (x1b + x2b + z2[1]) % q
                        wt = pz * w_weight
                        acc_u2[w2, y2, w1] += wt
                        acc_u1[w1, y1, w2] += wt
                        records.append((w1, w2, y1, y2, wt))
            map_u2 = np.argmax(acc_u2, axis=2)  # ties -> smallest message
            map_u1 = np.argmax(acc_u1, axis=2)
            err = 0.0
            for w1, w2, y1, y2, wt in records:
                if map_u2[w2, y2] != w1 or map_u1[w1, y1] != w2:
                    err += wt
            witness = {
                "user1": {"first": list(f1_first), "second": None if f1_second is None else [list(r) for r in f1_second]},
                "user2": {"first": list(f2_first), "second": None if f2_second is None else [list(r) for r in f2_second]},
            }
            if err < best["adaptive"][0]:
                best["adaptive"] = (err, witness)
            if na1 and na2 and err < best["nonadaptive"][0]:
                best["nonadaptive"] = (err, witness)

    n_adaptive = total
    n_nonadaptive = (q**M1 * (q**M1 if n == 2 else 1)) * (q**M2 * (q**M2 if n == 2 else 1))
    return SearchResult(
        q=q,
        n=n,
        M1=M1,
        M2=M2,
        best_nonadaptive_error=best["nonadaptive"][0],
        best_adaptive_error=best["adaptive"][0],
        witness_nonadaptive=best["nonadaptive"][1],
        witness_adaptive=best["adaptive"][1],
        n_adaptive_families=n_adaptive,
        n_nonadaptive_families=n_nonadaptive,
    )


def rate_capacity_sweep(q, noise2, rates, n_list, codebooks_per_point=200, trials_per_codebook=100, seed=0):
    """Mean ML block error of random coset codes vs (rate, blocklength).

    Returns one row dict per (rate, n) with the realized message count
    M = round(2**(rate*n)) and the Monte Carlo mean block error.
    """
    rows = []
    for ri, rate in enumerate(rates):
        for ni, n in enumerate(n_list):
            M = max(1, round(2 ** (rate * n)))
            if M > q**n:
                raise ValueError(f"rate {rate} at n={n} needs M={M} > q^n")
            errs = 0
            for b in range(codebooks_per_point):
                rng = derive_rng(seed, ri, ni, b)
                code = random_coset_code(q, n, M, noise2, rng)
                w = rng.integers(0, M, size=trials_per_codebook)
                z = noise2.sample_paths(trials_per_codebook, n, rng)
                dec = code.decode_batch((code.codewords[w] + z) % q)
                errs += int((dec != w).sum())
            rows.append(
                {
                    "rate": float(rate),
                    "n": int(n),
                    "M": int(M),
                    "mean_block_error": errs / (codebooks_per_point * trials_per_codebook),
                    "codebooks": codebooks_per_point,
                    "trials_per_codebook": trials_per_codebook,
                }
            )
    return rows
