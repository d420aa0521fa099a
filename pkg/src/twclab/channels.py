"""Time-step execution of the two-way and MA/DBC transmission equations.

Noise paths are generated up front and passed in, so two systems can be run
on the identical realization (pathwise coupling). Within a time step every
user's input is computed before any output is revealed: encoder i sees only
its own message and its received symbols up to time i-1.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .noise import DelayedCopyPair, IidNoise


class TwoWayChannel:
    """Two users exchanging symbols; each receives the sum of both inputs
    plus its own additive noise symbol, mod q."""

    def __init__(self, noise_spec):
        if isinstance(noise_spec, DelayedCopyPair):
            self.pair = noise_spec
            self.noise1 = None
            self.noise2 = None
            self.q = noise_spec.q
        else:
            n1, n2 = noise_spec
            if n1.q != n2.q:
                raise ValueError(f"alphabet mismatch between noises: {n1.q} vs {n2.q}")
            self.pair = None
            self.noise1 = n1
            self.noise2 = n2
            self.q = n1.q

    def sample_noise_batch(self, trials, n, rng):
        """(z1, z2) arrays of shape (trials, n)."""
        if self.pair is not None:
            return self.pair.sample_pairs(trials, n, rng)
        return self.noise1.sample_paths(trials, n, rng), self.noise2.sample_paths(trials, n, rng)

    def sample_noise(self, n, rng):
        z1, z2 = self.sample_noise_batch(1, n, rng)
        return z1[0], z2[0]


class MaDbcChannel:
    """Three users: 1 and 2 talk to 3 (multiple access direction) while 3
    broadcasts back through a physically degraded path (user 2's reception
    carries the extra noise z2 on top of z1)."""

    def __init__(self, z1, z2, z3):
        if not isinstance(z1, IidNoise) or not isinstance(z2, IidNoise):
            raise ValueError("broadcast-direction noises z1, z2 must be memoryless")
        if not (z1.q == z2.q == z3.q):
            raise ValueError("all noise alphabets must match")
        self.z1 = z1
        self.z2 = z2
        self.z3 = z3
        self.q = z1.q

    def sample_noise_batch(self, trials, n, rng):
        return (
            self.z1.sample_paths(trials, n, rng),
            self.z2.sample_paths(trials, n, rng),
            self.z3.sample_paths(trials, n, rng),
        )

    def sample_noise(self, n, rng):
        z1, z2, z3 = self.sample_noise_batch(1, n, rng)
        return z1[0], z2[0], z3[0]


@dataclass
class Transcript:
    """Full record of one run: inputs, outputs, noise, messages, decodes."""

    kind: str  # "2twc" | "madbc"
    q: int
    n: int
    inputs: dict = field(default_factory=dict)  # "x1", "x2", ("x3")
    outputs: dict = field(default_factory=dict)  # "y1", "y2", ("y3")
    noise: dict = field(default_factory=dict)  # "z1", "z2", ("z3")
    messages: dict = field(default_factory=dict)
    reconstructions: dict = field(default_factory=dict)

    def verify_equations(self):
        """Re-check every recorded symbol against the transmission equations."""
        q = self.q
        x1, x2 = self.inputs["x1"], self.inputs["x2"]
        z1, z2 = self.noise["z1"], self.noise["z2"]
        y1, y2 = self.outputs["y1"], self.outputs["y2"]
        if self.kind == "2twc":
            ok = np.array_equal((x1 + x2 + z1) % q, y1) and np.array_equal((x1 + x2 + z2) % q, y2)
        elif self.kind == "madbc":
            x3, z3, y3 = self.inputs["x3"], self.noise["z3"], self.outputs["y3"]
            ok = (
                np.array_equal((x1 + x3 + z1) % q, y1)
                and np.array_equal((x2 + x3 + z1 + z2) % q, y2)
                and np.array_equal((x1 + x2 + x3 + z3) % q, y3)
            )
        else:
            raise ValueError(f"unknown transcript kind {self.kind!r}")
        if not ok:
            raise AssertionError("transcript violates the channel equations")

    def verify_causality(self, schemes):
        """Recompute each input from (message, own outputs so far) and compare.

        schemes maps user labels ("1", "2", "3") to the schemes that ran.
        """
        if self.kind == "2twc":
            msgs = {"1": self.messages["w1"], "2": self.messages["w2"]}
        else:
            msgs = {
                "1": self.messages["w13"],
                "2": self.messages["w23"],
                "3": (self.messages["w31"], self.messages["w32"]),
            }
        for user, scheme in schemes.items():
            x = self.inputs[f"x{user}"]
            y = self.outputs[f"y{user}"]
            w = msgs[user]
            for i in range(self.n):
                if scheme.encode_step(w, [int(v) for v in y[:i]]) != x[i]:
                    raise AssertionError(f"user {user} input at step {i} is not causal")

    def to_dict(self):
        d = {"kind": self.kind, "q": self.q, "n": self.n}
        for group in (self.inputs, self.outputs, self.noise):
            for k, v in group.items():
                d[k] = [int(s) for s in v]
        d["messages"] = {k: list(v) if isinstance(v, tuple) else v for k, v in self.messages.items()}
        d["reconstructions"] = {
            k: list(v) if isinstance(v, tuple) else v for k, v in self.reconstructions.items()
        }
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_message(w, count, who):
    if isinstance(count, tuple):
        for wi, ci in zip(w, count):
            if not (0 <= wi < ci):
                raise ValueError(f"message {w} out of range for {who}")
    elif not (0 <= w < count):
        raise ValueError(f"message {w} out of range for {who}")


def run_2twc(channel, scheme1, scheme2, w1, w2, noise):
    """Execute one two-way block with the given noise realization.

    noise is the pair (z1, z2) of length-n symbol arrays. Returns the full
    transcript; reconstructions hold what1 (decoded at user 2) and what2
    (decoded at user 1).
    """
    z1, z2 = noise
    q = channel.q
    n = scheme1.n
    if scheme2.n != n or len(z1) != n or len(z2) != n:
        raise ValueError("scheme blocklengths and noise path lengths must agree")
    if scheme1.q != q or scheme2.q != q:
        raise ValueError("scheme alphabet does not match the channel")
    _check_message(w1, scheme1.num_messages, "user 1")
    _check_message(w2, scheme2.num_messages, "user 2")

    z1l = [int(v) for v in z1]
    z2l = [int(v) for v in z2]
    x1, x2, y1, y2 = [], [], [], []
    for i in range(n):
        a = scheme1.encode_step(w1, y1)
        b = scheme2.encode_step(w2, y2)
        x1.append(a)
        x2.append(b)
        s = a + b
        y1.append((s + z1l[i]) % q)
        y2.append((s + z2l[i]) % q)

    y1a = np.array(y1, dtype=np.int64)
    y2a = np.array(y2, dtype=np.int64)
    what2 = scheme1.decode(w1, y1a)
    what1 = scheme2.decode(w2, y2a)
    return Transcript(
        kind="2twc",
        q=q,
        n=n,
        inputs={"x1": np.array(x1, dtype=np.int64), "x2": np.array(x2, dtype=np.int64)},
        outputs={"y1": y1a, "y2": y2a},
        noise={"z1": np.asarray(z1, dtype=np.int64), "z2": np.asarray(z2, dtype=np.int64)},
        messages={"w1": w1, "w2": w2},
        reconstructions={"what1": what1, "what2": what2},
    )


def run_madbc(channel, schemes, messages, noise):
    """Execute one MA/DBC block.

    schemes = (s1, s2, s3); messages = (w13, w23, w31, w32); noise =
    (z1, z2, z3). User 3's scheme carries the message pair (w31, w32) and its
    decoder returns the pair (what13, what23); users 1 and 2 decode what31
    and what32.
    """
    s1, s2, s3 = schemes
    w13, w23, w31, w32 = messages
    z1, z2, z3 = noise
    q = channel.q
    n = s1.n
    if not (s2.n == s3.n == n and len(z1) == len(z2) == len(z3) == n):
        raise ValueError("scheme blocklengths and noise path lengths must agree")
    if not (s1.q == s2.q == s3.q == q):
        raise ValueError("scheme alphabet does not match the channel")
    _check_message(w13, s1.num_messages, "user 1")
    _check_message(w23, s2.num_messages, "user 2")
    _check_message((w31, w32), s3.num_messages, "user 3")

    z1l = [int(v) for v in z1]
    z2l = [int(v) for v in z2]
    z3l = [int(v) for v in z3]
    x1, x2, x3, y1, y2, y3 = [], [], [], [], [], []
    for i in range(n):
        a = s1.encode_step(w13, y1)
        b = s2.encode_step(w23, y2)
        c = s3.encode_step((w31, w32), y3)
        x1.append(a)
        x2.append(b)
        x3.append(c)
        y1.append((a + c + z1l[i]) % q)
        y2.append((b + c + z1l[i] + z2l[i]) % q)
        y3.append((a + b + c + z3l[i]) % q)

    y1a = np.array(y1, dtype=np.int64)
    y2a = np.array(y2, dtype=np.int64)
    y3a = np.array(y3, dtype=np.int64)
    what13, what23 = s3.decode((w31, w32), y3a)
    what31 = s1.decode(w13, y1a)
    what32 = s2.decode(w23, y2a)
    return Transcript(
        kind="madbc",
        q=q,
        n=n,
        inputs={
            "x1": np.array(x1, dtype=np.int64),
            "x2": np.array(x2, dtype=np.int64),
            "x3": np.array(x3, dtype=np.int64),
        },
        outputs={"y1": y1a, "y2": y2a, "y3": y3a},
        noise={
            "z1": np.asarray(z1, dtype=np.int64),
            "z2": np.asarray(z2, dtype=np.int64),
            "z3": np.asarray(z3, dtype=np.int64),
        },
        messages={"w13": w13, "w23": w23, "w31": w31, "w32": w32},
        reconstructions={
            "what13": what13,
            "what23": what23,
            "what31": what31,
            "what32": what32,
        },
    )
