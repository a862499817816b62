"""Command-line experiment runner.

``mixagg run CONFIG [--out DIR]``
    Play one game described by a JSON experiment file and write
    ``trace.csv``, ``trace.json``, ``summary.json`` and ``verification.json``.

``mixagg verify [--scope KINDS] [--trials N] [--seed S] [--out DIR]``
    Run the randomised mixability certification for the selected loss kinds.

The environment variable ``MIXAGG_SEED`` overrides the seed of a config.
Exit codes: 0 success, 1 failed verification or bound, 2 invalid config,
3 error during the game.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .certify import run_verification_suite
from .engine import GameConfig, aa_run, verify_regret_chain
from .errors import ConfigurationError, MixaggError
from .generators import build_streams
from .losses import LossSpec

EXPERIMENT_SCHEMA = "mixagg.experiment/1"
SUMMARY_SCHEMA = "mixagg.summary/1"
REPORT_SCHEMA = "mixagg.verification/1"
FORMATS = ("csv", "json")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GAME = 0, 1, 2, 3


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(data: dict, key: str, where: str):
    if key not in data:
        raise ConfigurationError(f"{where}: missing field {key!r}")
    return data[key]


def load_experiment(path: str | Path, seed_override=None):
    """Parse and validate an experiment file.

    Returns ``(config, streams, output_dir, formats)``. Any problem raises
    :class:`ConfigurationError` with the offending line or field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    schema = data.get("schema", EXPERIMENT_SCHEMA)
    if schema != EXPERIMENT_SCHEMA:
        raise ConfigurationError(f"schema: expected {EXPERIMENT_SCHEMA!r}, got {schema!r}")
    unknown = set(data) - {"schema", "game", "expert_pool", "outcome_stream", "output", "formats"}
    if unknown:
        raise ConfigurationError(f"unknown top-level field(s) {sorted(unknown)}")
    game = _require(data, "game", "config")
    if not isinstance(game, dict):
        raise ConfigurationError("game: must be an object")
    try:
        loss = LossSpec.from_dict(_require(game, "loss", "game"))
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"game.loss: {exc}") from None
    seed = game.get("seed", 0)
    if seed_override is not None:
        seed = seed_override
    try:
        seed = int(seed)
        n = int(_require(game, "n_experts", "game"))
        horizon = int(_require(game, "horizon", "game"))
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"game: {exc}") from None
    if not 0 <= seed < 2**64:
        raise ConfigurationError("game.seed must be a 64-bit unsigned integer")
    config = GameConfig(loss, game.get("mode", "mixable"), n, horizon, seed, game.get("prior"))
    formats = data.get("formats", list(FORMATS))
    if not isinstance(formats, list) or not set(formats) <= set(FORMATS) or not formats:
        raise ConfigurationError(f"formats: must be a non-empty subset of {list(FORMATS)}")
    streams = build_streams(
        loss,
        n,
        horizon,
        _require(data, "expert_pool", "config"),
        data.get("outcome_stream", {}),
        seed,
        base_dir=path.parent,
    )
    return config, streams, data.get("output"), formats


def run_experiment(config_path, out=None, seed_override=None, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        config, (experts, outcomes), output, formats = load_experiment(config_path, seed_override)
    except (MixaggError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = out or output
    if not out:
        print("config error: no output directory (set 'output' or pass --out)", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trace = aa_run(config, experts, outcomes)
    except MixaggError as exc:
        where = []
        if getattr(exc, "round", None) is not None:
            where.append(f"round {exc.round}")
        if getattr(exc, "expert", None) is not None:
            where.append(f"expert {exc.expert}")
        print(f"game error ({', '.join(where) or 'setup'}): {exc}", file=sys.stderr)
        return EXIT_GAME
    report = verify_regret_chain(trace)
    L = trace.cumulative_expert_loss
    summary = {
        "schema": SUMMARY_SCHEMA,
        "loss": config.loss.kind.value,
        "mode": config.mode,
        "eta": config.eta,
        "n_experts": config.n_experts,
        "horizon": config.horizon,
        "seed": config.seed,
        "H_T": trace.cumulative_learner_loss,
        "L_T": L.tolist(),
        "R_T": trace.regret,
        "bound": trace.regret_bound,
        "bound_satisfied": bool(trace.regret <= trace.regret_bound + 1e-8 * (1.0 + trace.regret_bound)),
        "chain_passed": report.passed,
    }
    files = {"summary.json": _dump(summary), "verification.json": _dump(report.to_dict())}
    if "csv" in formats:
        files["trace.csv"] = trace.to_csv()
    if "json" in formats:
        files["trace.json"] = trace.to_json() + "\n"
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    print(
        f"R_T={summary['R_T']:.6f} bound={summary['bound']:.6f} "
        f"bound_satisfied={str(summary['bound_satisfied']).lower()} chain_passed={str(report.passed).lower()}",
        file=stream,
    )
    return EXIT_OK if summary["bound_satisfied"] and report.passed else EXIT_FAIL


def run_verify(scope, trials: int, seed: int, out=None, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        rows = run_verification_suite(scope, trials, seed)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for r in rows:
        print(r.line(), file=stream)
    report = {"schema": REPORT_SCHEMA, "seed": seed, "trials": trials, "rows": [r.to_dict() for r in rows]}
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "verification.json").write_text(_dump(report))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def _env_seed():
    raw = os.environ.get("MIXAGG_SEED")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"MIXAGG_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixagg", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="play a game from an experiment file")
    run.add_argument("config", help="experiment JSON file")
    run.add_argument("--out", help="output directory (overrides the config)")
    ver = sub.add_parser("verify", help="certify aggregation rules on random instances")
    ver.add_argument("--scope", default="all", help="comma-separated loss kinds, or 'all'")
    ver.add_argument("--trials", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--out", help="directory for verification.json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        env_seed = _env_seed()
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run":
        return run_experiment(args.config, args.out, env_seed)
    scope = None if args.scope.strip().lower() == "all" else [s.strip() for s in args.scope.split(",") if s.strip()]
    seed = args.seed if args.seed is not None else (env_seed or 0)
    return run_verify(scope, args.trials, seed, args.out)


if __name__ == "__main__":
    sys.exit(main())
