"""Command-line front end: experiment configs in, machine-readable results out.

Subcommands: region | simulate | search | sweep. Every command is a pure
function of (config, seed); re-running writes byte-identical files. Exit
codes: 0 success, 2 config error, 3 enumeration cap exceeded.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .alphabet import Pmf
from .coding import (
    EnumerationCapError,
    coset_code_from_seed,
    compose_2twc,
    delayed_copy_feedback_scheme,
    mac_joint_ml_code,
    superposition_dbc_code,
)
from .channels import TwoWayChannel, run_2twc
from .noise import DelayedCopyPair, noise_from_config
from .regions import madbc_region, region_2twc
from .seeds import derive_rng
from .verify import (
    coupled_equivalence,
    coupled_equivalence_madbc,
    exhaustive_code_search,
    monte_carlo,
    rate_capacity_sweep,
)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    command: str
    payload: dict
    seed: int
    out: str
    fmt: str  # "json" | "csv" | "both"
    parallel: int

    def to_dict(self):
        return {
            "command": self.command,
            "payload": self.payload,
            "seed": self.seed,
            "out": self.out,
            "format": self.fmt,
            "parallel": self.parallel,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        return cls(
            command=d["command"],
            payload=d["payload"],
            seed=d["seed"],
            out=d["out"],
            fmt=d["format"],
            parallel=d["parallel"],
        )

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def _load_payload(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config ({e})") from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return payload


def _require(payload, key, path="$"):
    if key not in payload:
        raise ConfigError(f"{path}.{key}: missing required field")
    return payload[key]


def _noise(payload, key, path="$"):
    cfg = _require(payload, key, path)
    try:
        return noise_from_config(cfg)
    except (ValueError, KeyError) as e:
        raise ConfigError(f"{path}.{key}: {e}") from e


def _pmf(payload, key, path="$"):
    try:
        return Pmf(_require(payload, key, path))
    except ValueError as e:
        raise ConfigError(f"{path}.{key}: {e}") from e


def _write(outdir, name, text):
    path = Path(outdir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _emit_json(cfg, obj):
    obj = {"schema_version": SCHEMA_VERSION, **obj}
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_region(cfg):
    p = cfg.payload
    kind = _require(p, "kind")
    written = []
    if kind == "2twc":
        q = _require(p, "q")
        if "noise" in p:
            model = _noise(p, "noise")
            if not isinstance(model, DelayedCopyPair):
                raise ConfigError("$.noise: single-noise form requires kind 'delayed_copy'")
            region = region_2twc(model)
        else:
            region = region_2twc(_noise(p, "noise1"), _noise(p, "noise2"))
        if region.q != q:
            raise ConfigError(f"$.q: channel q={q} does not match noise alphabet {region.q}")
        if cfg.fmt in ("json", "both"):
            written.append(_write(cfg.out, "region.json", _emit_json(cfg, region.to_dict())))
        if cfg.fmt in ("csv", "both"):
            written.append(_write(cfg.out, "region.csv", f"c1,c2\n{region.c1!r},{region.c2!r}\n"))
        return written
    if kind == "madbc":
        q = _require(p, "q")
        z3 = _noise(p, "z3")
        z1 = _pmf(p, "z1")
        z2 = _pmf(p, "z2")
        region = madbc_region(
            q,
            z3,
            z1,
            z2,
            lambda_grid=None if "lambda_points" not in p else [i / (p["lambda_points"] - 1) for i in range(p["lambda_points"])],
            n_starts=p.get("starts", 32),
            seed=cfg.seed,
        )
        if cfg.fmt in ("json", "both"):
            written.append(_write(cfg.out, "region.json", _emit_json(cfg, region.to_dict())))
        if cfg.fmt in ("csv", "both"):
            lines = ["r31,r32,lambda"]
            for pt in region.boundary:
                lines.append(f"{pt.r31!r},{pt.r32!r},{pt.lam!r}")
            written.append(_write(cfg.out, "boundary.csv", "\n".join(lines) + "\n"))
        return written
    raise ConfigError(f"$.kind: unknown region kind {kind!r}")


def _build_code(spec, q, n, noise, default_seed, path):
    if spec.get("kind", "coset") != "coset":
        raise ConfigError(f"{path}.kind: only 'coset' codes are supported")
    try:
        return coset_code_from_seed(spec.get("seed", default_seed), q, n, _require(spec, "M", path), noise)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def cmd_simulate(cfg):
    p = cfg.payload
    mode = _require(p, "mode")
    trials = _require(p, "trials")
    if mode == "coupled_2twc" or mode == "monte_carlo":
        q = _require(p, "q")
        n = _require(p, "n")
        noise1 = _noise(p, "noise1")
        noise2 = _noise(p, "noise2")
        code1 = _build_code(_require(p, "code1"), q, n, noise2, 101, "$.code1")
        code2 = _build_code(_require(p, "code2"), q, n, noise1, 102, "$.code2")
        if mode == "coupled_2twc":
            report = coupled_equivalence(
                code1,
                code2,
                trials,
                cfg.seed,
                negative_control=p.get("negative_control", False),
                workers=cfg.parallel,
            )
        else:
            channel = TwoWayChannel((noise1, noise2))
            report = monte_carlo(channel, compose_2twc(code1, code2), trials, cfg.seed, workers=cfg.parallel)
    elif mode == "coupled_madbc":
        q = _require(p, "q")
        n = _require(p, "n")
        z3 = _noise(p, "z3")
        z1 = _pmf(p, "z1")
        z2 = _pmf(p, "z2")
        mspec = _require(p, "mac")
        mac = mac_joint_ml_code(
            q, n, _require(mspec, "M1", "$.mac"), _require(mspec, "M2", "$.mac"), z3,
            derive_rng(mspec.get("seed", 103)),
        )
        dspec = _require(p, "dbc")
        dbc = superposition_dbc_code(
            q,
            n,
            _require(dspec, "M31", "$.dbc"),
            _require(dspec, "M32", "$.dbc"),
            dspec.get("p_u", [1.0 / q] * q + [0.0]),
            dspec.get("p_x3_given_u", [[1.0 / q] * q for _ in range(q + 1)]),
            z1,
            z2,
            derive_rng(dspec.get("seed", 104)),
        )
        report = coupled_equivalence_madbc(
            mac, dbc, trials, cfg.seed,
            negative_control=p.get("negative_control", False),
            workers=cfg.parallel,
        )
    elif mode == "feedback_cancel":
        n = _require(p, "n")
        channel = TwoWayChannel(DelayedCopyPair())
        schemes = delayed_copy_feedback_scheme(n)
        report = monte_carlo(channel, schemes, trials, cfg.seed, workers=cfg.parallel)
    else:
        raise ConfigError(f"$.mode: unknown simulate mode {mode!r}")

    written = []
    if cfg.fmt in ("json", "both"):
        written.append(_write(cfg.out, "report.json", _emit_json(cfg, report.to_dict())))
    if cfg.fmt in ("csv", "both"):
        written.append(_write(cfg.out, "report.csv", report.to_csv()))
    n_dump = p.get("dump_transcripts", 0)
    if n_dump:
        written.append(
            _write(cfg.out, "transcripts.json",
                   _emit_json(cfg, {"transcripts": _dump_transcripts(cfg, p, mode, n_dump)}))
        )
    return written


def _dump_transcripts(cfg, p, mode, count):
    """Run a few fully-recorded blocks and return their transcript dicts."""
    out = []
    if mode == "feedback_cancel":
        channel = TwoWayChannel(DelayedCopyPair())
        schemes = delayed_copy_feedback_scheme(p["n"])
    elif mode in ("coupled_2twc", "monte_carlo"):
        noise1 = _noise(p, "noise1")
        noise2 = _noise(p, "noise2")
        channel = TwoWayChannel((noise1, noise2))
        code1 = _build_code(p["code1"], p["q"], p["n"], noise2, 101, "$.code1")
        code2 = _build_code(p["code2"], p["q"], p["n"], noise1, 102, "$.code2")
        schemes = compose_2twc(code1, code2)
    else:
        raise ConfigError("$.dump_transcripts: only two-user simulate modes record transcripts")
    s1, s2 = schemes
    for k in range(count):
        rng = derive_rng(cfg.seed, 999_000 + k)
        w1 = int(rng.integers(0, min(s1.num_messages, 2**63)))
        w2 = int(rng.integers(0, min(s2.num_messages, 2**63)))
        tr = run_2twc(channel, s1, s2, w1, w2, channel.sample_noise(s1.n, rng))
        out.append(tr.to_dict())
    return out


def cmd_search(cfg):
    p = cfg.payload
    n = _require(p, "n")
    if "noise" in p:
        spec = _noise(p, "noise")
        if not isinstance(spec, DelayedCopyPair):
            raise ConfigError("$.noise: single-noise form requires kind 'delayed_copy'")
    else:
        spec = (_noise(p, "noise1"), _noise(p, "noise2"))
    try:
        result = exhaustive_code_search(
            spec, n, _require(p, "M1"), _require(p, "M2"), cap=p.get("cap", 10_000_000)
        )
    except ValueError as e:
        raise ConfigError(f"$: {e}") from e
    written = []
    if cfg.fmt in ("json", "both"):
        written.append(_write(cfg.out, "search.json", _emit_json(cfg, result.to_dict())))
    if cfg.fmt in ("csv", "both"):
        written.append(
            _write(
                cfg.out,
                "search.csv",
                "best_nonadaptive_error,best_adaptive_error\n"
                f"{result.best_nonadaptive_error!r},{result.best_adaptive_error!r}\n",
            )
        )
    return written


def cmd_sweep(cfg):
    p = cfg.payload
    rows = rate_capacity_sweep(
        _require(p, "q"),
        _noise(p, "noise"),
        _require(p, "rates"),
        _require(p, "n_list"),
        codebooks_per_point=p.get("codebooks", 200),
        trials_per_codebook=p.get("trials_per_codebook", 100),
        seed=cfg.seed,
    )
    written = []
    if cfg.fmt in ("json", "both"):
        written.append(_write(cfg.out, "sweep.json", _emit_json(cfg, {"rows": rows})))
    if cfg.fmt in ("csv", "both"):
        lines = ["rate,n,M,mean_block_error,codebooks,trials_per_codebook"]
        for r in rows:
            lines.append(
                f"{r['rate']!r},{r['n']},{r['M']},{r['mean_block_error']!r},"
                f"{r['codebooks']},{r['trials_per_codebook']}"
            )
        written.append(_write(cfg.out, "sweep.csv", "\n".join(lines) + "\n"))
    return written


_COMMANDS = {
    "region": cmd_region,
    "simulate": cmd_simulate,
    "search": cmd_search,
    "sweep": cmd_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="twclab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--parallel", type=int, default=1, help="worker count (results identical)")
        sp.add_argument("--format", choices=["json", "csv", "both"], default="both")
    return parser


def load_config(args):
    payload = _load_payload(args.config)
    seed = args.seed if args.seed is not None else payload.pop("seed", None)
    if seed is None:
        raise ConfigError("$.seed: a master seed is mandatory (config field or --seed)")
    if args.parallel < 1:
        raise ConfigError("--parallel must be >= 1")
    return ExperimentConfig(
        command=args.command,
        payload=payload,
        seed=int(seed),
        out=args.out,
        fmt=args.format,
        parallel=args.parallel,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        written = _COMMANDS[cfg.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except EnumerationCapError as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
