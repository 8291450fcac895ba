"""Experiment runner and command line interface.

Runs seeded training sweeps over the benchmark tasks and emits two kinds of
artifact into an output directory: one cost-curve CSV per seed
(cost_seed<seed>.csv with header ``epoch,cost``) and a summary.json holding
per-seed outcomes, the median epoch count, and the representability oracle
verdict for the trained template.  Identical configuration produces
byte-identical files.

Config precedence is flags > JSON config file > defaults.  The config file
uses the field names of ExperimentConfig verbatim.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import InvalidInputError, MultiQubitTerm, NeuralPotential
from .dynamics import adiabatic_profile
from .tasks import (
    TASK_IDS,
    FeasibilityVerdict,
    TaskSpec,
    canonical_task_id,
    check_exact_representability,
    resolve_task,
    verify_truth_table,
)
from .training import (
    CostCurve,
    TrainedNetwork,
    TrainerConfig,
    detect_plateau,
    initialize_network,
    train,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SeedOutcome",
    "ExperimentResult",
    "run_experiment",
    "emit_cost_curve_csv",
    "emit_summary",
    "load_summary",
    "load_network_from_summary",
    "cli",
    "main",
]


class ConfigError(ValueError):
    """Unresolvable or inconsistent experiment configuration."""


_MODES = ("quantum", "classical")
_TEMPLATES = ("paper", "extended", "two-qubit")
_BIT_ORDERS = ("msb", "lsb")

_CONFIG_KEYS = (
    "task",
    "mode",
    "eta",
    "seed",
    "seeds",
    "max_epochs",
    "cost_tolerance",
    "init_range",
    "plateau_window",
    "plateau_epsilon",
    "bit_order",
    "template",
    "out_dir",
    "require_convergence",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved settings for one training experiment."""

    task: str
    mode: str = "quantum"
    eta: float = 1.5
    seeds: tuple[int, ...] = (0,)
    max_epochs: int = 5000
    cost_tolerance: float = 0.01
    init_range: float = 0.5
    plateau_window: int = 200
    plateau_epsilon: float = 5e-4
    bit_order: str = "msb"
    template: str = "paper"
    out_dir: str = "results"
    require_convergence: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", canonical_task_id(self.task))
        if self.task not in TASK_IDS:
            raise ConfigError(
                f"unknown task {self.task!r}, expected one of {', '.join(TASK_IDS)}"
            )
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.template not in _TEMPLATES:
            raise ConfigError(
                f"template must be one of {_TEMPLATES}, got {self.template!r}"
            )
        if self.bit_order not in _BIT_ORDERS:
            raise ConfigError(
                f"bit_order must be one of {_BIT_ORDERS}, got {self.bit_order!r}"
            )
        if len(self.seeds) == 0:
            raise ConfigError("at least one seed is required")
        if any(not isinstance(s, int) or isinstance(s, bool) for s in self.seeds):
            raise ConfigError("seeds must be integers")
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise ConfigError("eta must be a finite positive real")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be at least 1")
        if not (self.cost_tolerance > 0):
            raise ConfigError("cost_tolerance must be positive")
        if not (self.init_range > 0 and np.isfinite(self.init_range)):
            raise ConfigError("init_range must be a finite positive real")
        if self.plateau_window < 2:
            raise ConfigError("plateau_window must be at least 2")
        if not (self.plateau_epsilon > 0):
            raise ConfigError("plateau_epsilon must be positive")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def trainer_config(self, seed: int) -> TrainerConfig:
        return TrainerConfig(
            eta=self.eta,
            max_epochs=self.max_epochs,
            cost_tolerance=self.cost_tolerance,
            init_range=self.init_range,
            seed=seed,
            plateau_window=self.plateau_window,
            plateau_epsilon=self.plateau_epsilon,
        )


@dataclass(frozen=True)
class SeedOutcome:
    """Everything one seeded run produced."""

    seed: int
    curve: CostCurve
    network: TrainedNetwork
    final_cost: float
    plateau: float | None
    elapsed_seconds: float

    @property
    def epochs_to_tolerance(self) -> int | None:
        return self.curve.epochs_to_tolerance


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of a full seed sweep plus the template's oracle verdict."""

    config: ExperimentConfig
    task: TaskSpec
    encoding: str
    outcomes: tuple[SeedOutcome, ...]
    oracle: tuple[FeasibilityVerdict, ...]
    median_epochs_to_tolerance: float | None
    elapsed_seconds: float


def _resolve_for_config(config: ExperimentConfig) -> tuple[TaskSpec, str]:
    # classical mode trains on raw bits with every product term stripped
    two_qubit_only = config.template == "two-qubit" or config.mode == "classical"
    extended = config.template == "extended"
    task = resolve_task(
        config.task,
        bit_order=config.bit_order,  # type: ignore[arg-type]
        two_qubit_only=two_qubit_only,
        extended=extended,
    )
    encoding = "bit" if config.mode == "classical" else "spin"
    return task, encoding


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Train every seed, detect plateaus, and audit the template."""
    started = time.perf_counter()
    task, encoding = _resolve_for_config(config)

    def run_seed(seed: int) -> SeedOutcome:
        t0 = time.perf_counter()
        trainer = config.trainer_config(seed)
        net0 = initialize_network(
            task.arity, task.templates, trainer, task_name=task.name
        )
        net, curve = train(net0, task.examples, trainer, encoding)  # type: ignore[arg-type]
        plateau = None
        if len(curve.costs) > trainer.plateau_window:
            plateau = detect_plateau(curve, trainer)
        curve.plateau_value = plateau
        return SeedOutcome(
            seed=seed,
            curve=curve,
            network=net,
            final_cost=float(curve.costs[-1]),
            plateau=plateau,
            elapsed_seconds=time.perf_counter() - t0,
        )

    # seeds are independent; run them on a small thread pool and collect
    # results in seed order so emitted artifacts stay deterministic
    workers = min(len(config.seeds), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = tuple(pool.map(run_seed, config.seeds))

    oracle = tuple(
        check_exact_representability(task, j) for j in range(task.n_outputs)
    )
    epoch_counts = [
        float("inf") if o.epochs_to_tolerance is None else float(o.epochs_to_tolerance)
        for o in outcomes
    ]
    median = float(np.median(epoch_counts))
    return ExperimentResult(
        config=config,
        task=task,
        encoding=encoding,
        outcomes=outcomes,
        oracle=oracle,
        median_epochs_to_tolerance=None if np.isinf(median) else median,
        elapsed_seconds=time.perf_counter() - started,
    )


def emit_cost_curve_csv(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Write cost_seed<seed>.csv per seed; 12 significant digits per cost."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for outcome in result.outcomes:
        path = out / f"cost_seed{outcome.seed}.csv"
        with open(path, "w", newline="\n") as fh:
            fh.write("epoch,cost\n")
            for e, c in enumerate(outcome.curve.costs, start=1):
                fh.write(f"{e},{c:.12g}\n")
        paths.append(path)
    return paths


def _weights_payload(net: TrainedNetwork) -> list[dict[str, Any]]:
    payload = []
    for p in net.perceptrons:
        payload.append(
            {
                "linear": list(p.linear_weights),
                "multi": [
                    {"indices": list(t.indices), "weight": t.weight}
                    for t in p.multi_terms
                ],
                "bias": p.bias,
            }
        )
    return payload


def emit_summary(result: ExperimentResult, path: str | Path) -> Path:
    """Write the experiment summary JSON; key set is part of the contract."""
    config = result.config
    per_seed = []
    for o in result.outcomes:
        per_seed.append(
            {
                "seed": o.seed,
                "epochs_to_tolerance": o.epochs_to_tolerance,
                "final_cost": o.final_cost,
                "plateau": o.plateau,
                "weights": _weights_payload(o.network),
            }
        )
    doc = {
        "task": config.task,
        "mode": config.mode,
        "eta": config.eta,
        "seeds": list(config.seeds),
        "max_epochs": config.max_epochs,
        "cost_tolerance": config.cost_tolerance,
        "init_range": config.init_range,
        "bit_order": config.bit_order,
        "template": config.template,
        "per_seed": per_seed,
        "median_epochs_to_tolerance": result.median_epochs_to_tolerance,
        "oracle_verdict": [
            "feasible" if v.feasible else "infeasible" for v in result.oracle
        ],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return path


def load_summary(path: str | Path) -> dict[str, Any]:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "per_seed" not in doc:
        raise ConfigError(f"{path} is not an experiment summary")
    return doc


def load_network_from_summary(
    path: str | Path, seed: int | None = None
) -> TrainedNetwork:
    """Rebuild the trained network stored for one seed (default: first)."""
    doc = load_summary(path)
    entries = doc["per_seed"]
    if seed is None:
        entry = entries[0]
    else:
        matches = [e for e in entries if e["seed"] == seed]
        if not matches:
            raise ConfigError(f"summary has no seed {seed}")
        entry = matches[0]
    perceptrons = []
    for w in entry["weights"]:
        perceptrons.append(
            NeuralPotential(
                linear_weights=tuple(float(v) for v in w["linear"]),
                bias=float(w["bias"]),
                multi_terms=tuple(
                    MultiQubitTerm(tuple(int(i) for i in t["indices"]), float(t["weight"]))
                    for t in w["multi"]
                ),
            )
        )
    epochs = entry["epochs_to_tolerance"]
    return TrainedNetwork(
        perceptrons=tuple(perceptrons),
        arity=perceptrons[0].arity,
        task_name=doc["task"],
        seed=entry["seed"],
        epochs_run=0 if epochs is None else int(epochs),
    )


# --- configuration assembly ---


def _split_task(raw: str) -> tuple[str, str | None]:
    """A task id may carry a template suffix, e.g. fredkin:paper."""
    parts = raw.split(":")
    if len(parts) == 1:
        return parts[0], None
    if len(parts) == 2:
        if parts[1] not in _TEMPLATES:
            raise ConfigError(
                f"unknown template suffix {parts[1]!r} in task {raw!r}"
            )
        return parts[0], parts[1]
    raise ConfigError(f"malformed task id {raw!r}")


def _parse_seed_list(raw: str) -> tuple[int, ...]:
    """Comma-separated integers; a-b runs an inclusive range."""
    seeds: list[int] = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            raise ConfigError(f"empty entry in seed list {raw!r}")
        lo, sep, hi = item.partition("-")
        try:
            if sep and lo:  # "a-b"; a bare leading - is a negative seed
                a, b = int(lo), int(hi)
                if b < a:
                    raise ConfigError(f"descending seed range {item!r}")
                seeds.extend(range(a, b + 1))
            else:
                seeds.append(int(item))
        except ValueError as exc:
            raise ConfigError(f"bad seed entry {item!r}") from exc
    return tuple(seeds)


def _load_config_file(path: str) -> dict[str, Any]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(doc) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return doc


def _build_experiment_config(
    args: argparse.Namespace, default_seeds: tuple[int, ...]
) -> ExperimentConfig:
    file_vals = _load_config_file(args.config) if args.config else {}

    raw_task = args.task if args.task is not None else file_vals.get("task")
    if raw_task is None:
        raise ConfigError("a task is required (--task or config file)")
    task_id, suffix_template = _split_task(str(raw_task))

    if (
        args.template is not None
        and suffix_template is not None
        and args.template != suffix_template
    ):
        raise ConfigError(
            f"--template {args.template} conflicts with task suffix "
            f":{suffix_template}"
        )
    template = args.template or suffix_template or file_vals.get("template", "paper")

    if args.seed is not None and args.seeds is not None:
        raise ConfigError("--seed and --seeds are mutually exclusive")
    if args.seed is not None:
        seeds: tuple[int, ...] = (args.seed,)
    elif args.seeds is not None:
        seeds = _parse_seed_list(args.seeds)
    elif "seed" in file_vals and "seeds" in file_vals:
        raise ConfigError("config file sets both seed and seeds")
    elif "seed" in file_vals:
        seeds = (int(file_vals["seed"]),)
    elif "seeds" in file_vals:
        raw = file_vals["seeds"]
        if not isinstance(raw, list):
            raise ConfigError("config key seeds must be a list of integers")
        seeds = tuple(int(s) for s in raw)
    else:
        seeds = default_seeds

    def pick(flag_value: Any, key: str, default: Any) -> Any:
        if flag_value is not None:
            return flag_value
        return file_vals.get(key, default)

    return ExperimentConfig(
        task=task_id,
        mode=pick(args.mode, "mode", "quantum"),
        eta=float(pick(args.eta, "eta", 1.5)),
        seeds=seeds,
        max_epochs=int(pick(args.max_epochs, "max_epochs", 5000)),
        cost_tolerance=float(pick(args.tol, "cost_tolerance", 0.01)),
        init_range=float(pick(args.init_range, "init_range", 0.5)),
        plateau_window=int(pick(args.plateau_window, "plateau_window", 200)),
        plateau_epsilon=float(pick(args.plateau_epsilon, "plateau_epsilon", 5e-4)),
        bit_order=pick(args.bit_order, "bit_order", "msb"),
        template=template,
        out_dir=str(pick(args.out, "out_dir", "results")),
        require_convergence=bool(
            pick(args.require_convergence, "require_convergence", False)
        ),
    )


# --- subcommands ---


def _run_and_emit(config: ExperimentConfig) -> int:
    result = run_experiment(config)
    csv_paths = emit_cost_curve_csv(result, config.out_dir)
    summary_path = emit_summary(result, Path(config.out_dir) / "summary.json")
    print(
        f"task={config.task} mode={config.mode} template={config.template} "
        f"bit_order={config.bit_order} eta={config.eta}"
    )
    for o in result.outcomes:
        epochs = "-" if o.epochs_to_tolerance is None else str(o.epochs_to_tolerance)
        plateau = "-" if o.plateau is None else f"{o.plateau:.6g}"
        print(
            f"seed {o.seed}: epochs_to_tolerance={epochs} "
            f"final_cost={o.final_cost:.6g} plateau={plateau}"
        )
    median = result.median_epochs_to_tolerance
    print(f"median_epochs_to_tolerance={'-' if median is None else median}")
    verdicts = ",".join(
        "feasible" if v.feasible else "infeasible" for v in result.oracle
    )
    print(f"oracle_verdict={verdicts}")
    for p in csv_paths:
        print(f"wrote {p}")
    print(f"wrote {summary_path}")
    print(f"elapsed_seconds={result.elapsed_seconds:.3f}")
    if config.require_convergence and any(
        o.epochs_to_tolerance is None for o in result.outcomes
    ):
        print("non-convergence under --require-convergence", file=sys.stderr)
        return 2
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    return _run_and_emit(_build_experiment_config(args, default_seeds=(0,)))


def _cmd_sweep(args: argparse.Namespace) -> int:
    return _run_and_emit(
        _build_experiment_config(args, default_seeds=tuple(range(20)))
    )


def _cmd_adiabatic_check(args: argparse.Namespace) -> int:
    if args.points < 1:
        raise ConfigError("--points must be at least 1")
    xs = np.linspace(args.x_min, args.x_max, args.points)
    profile = adiabatic_profile(
        xs,
        t_f=args.t_f,
        dt=args.dt,
        omega_start_factor=args.omega_factor,
        omega_end=args.omega_end,
    )
    print("x,probability,target,error")
    for x, p, t, e in zip(
        profile.xs, profile.probabilities, profile.targets, profile.errors
    ):
        print(f"{x:.6g},{p:.12g},{t:.12g},{e:.6g}")
    print(f"max_error={profile.max_error:.6g}")
    print(f"mean_error={profile.mean_error:.6g}")
    print(f"max_norm_drift={profile.max_drift:.6g}")
    return 0


def _cmd_gate_verify(args: argparse.Namespace) -> int:
    doc = load_summary(args.summary)
    net = load_network_from_summary(args.summary, args.seed)
    template = doc.get("template", "paper")
    task = resolve_task(
        doc["task"],
        bit_order=doc.get("bit_order", "msb"),
        two_qubit_only=template == "two-qubit" or doc.get("mode") == "classical",
        extended=template == "extended",
    )
    ok = True
    for engine in ("scalar", "statevector"):
        report = verify_truth_table(net, task, engine=engine)  # type: ignore[arg-type]
        print(
            f"{engine}: {report.n_correct}/{report.n_rows} rows correct, "
            f"max |y - t| = {report.max_abs_error:.6g}"
        )
        for bits, predicted, expected in report.mismatches:
            print(f"  mismatch at input {bits}: predicted {predicted}, expected {expected}")
        ok = ok and report.all_correct
    print("verdict=" + ("pass" if ok else "fail"))
    return 0


def _cmd_feasibility(args: argparse.Namespace) -> int:
    task_id, suffix_template = _split_task(args.task)
    if (
        args.template is not None
        and suffix_template is not None
        and args.template != suffix_template
    ):
        raise ConfigError(
            f"--template {args.template} conflicts with task suffix "
            f":{suffix_template}"
        )
    template = args.template or suffix_template or "paper"
    for bit_order in _BIT_ORDERS:
        task = resolve_task(
            task_id,
            bit_order=bit_order,  # type: ignore[arg-type]
            two_qubit_only=template == "two-qubit",
            extended=template == "extended",
        )
        for j in range(task.n_outputs):
            verdict = check_exact_representability(task, j)
            state = "feasible" if verdict.feasible else "infeasible"
            margin = verdict.margin + 0.0  # normalize -0.0 for display
            print(
                f"{task.name}:{template} [{bit_order}] output {j + 1}: "
                f"{state} (margin={margin:.6g})"
            )
    return 0


# --- parser ---


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--task", help="task id, optionally with :template suffix")
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--mode", choices=_MODES)
    parser.add_argument("--eta", type=float, help="learning rate")
    parser.add_argument("--seed", type=int, help="single seed")
    parser.add_argument("--seeds", help="comma list of seeds, a-b for ranges")
    parser.add_argument("--max-epochs", type=int, dest="max_epochs")
    parser.add_argument(
        "--tol", type=float, help="stop once the cost drops below this"
    )
    parser.add_argument("--init-range", type=float, dest="init_range")
    parser.add_argument("--plateau-window", type=int, dest="plateau_window")
    parser.add_argument("--plateau-epsilon", type=float, dest="plateau_epsilon")
    parser.add_argument("--bit-order", choices=_BIT_ORDERS, dest="bit_order")
    parser.add_argument("--template", choices=_TEMPLATES)
    parser.add_argument("--out", help="output directory")
    parser.add_argument(
        "--require-convergence",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="exit 2 unless every seed reaches the tolerance",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qperceptron",
        description=(
            "Train quantum perceptron networks on truth-table tasks and "
            "audit what their templates can represent."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run one experiment (default: seed 0)")
    _add_train_flags(p_train)
    p_train.set_defaults(handler=_cmd_train)

    p_sweep = sub.add_parser(
        "sweep", help="run a multi-seed experiment (default: seeds 0-19)"
    )
    _add_train_flags(p_sweep)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_adiabatic = sub.add_parser(
        "adiabatic-check",
        help="evolve a grid of potentials and compare against the activation",
    )
    p_adiabatic.add_argument("--x-min", type=float, default=-3.0, dest="x_min")
    p_adiabatic.add_argument("--x-max", type=float, default=3.0, dest="x_max")
    p_adiabatic.add_argument("--points", type=int, default=7)
    p_adiabatic.add_argument("--t-f", type=float, default=200.0, dest="t_f")
    p_adiabatic.add_argument("--dt", type=float, default=1e-3)
    p_adiabatic.add_argument(
        "--omega-factor", type=float, default=50.0, dest="omega_factor"
    )
    p_adiabatic.add_argument(
        "--omega-end", type=float, default=1.0, dest="omega_end"
    )
    p_adiabatic.set_defaults(handler=_cmd_adiabatic_check)

    p_verify = sub.add_parser(
        "gate-verify",
        help="check a trained network against its truth table on both engines",
    )
    p_verify.add_argument("--summary", required=True, help="summary.json path")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.set_defaults(handler=_cmd_gate_verify)

    p_feas = sub.add_parser(
        "feasibility",
        help="representability verdict per output under both bit orders",
    )
    p_feas.add_argument("--task", required=True)
    p_feas.add_argument("--template", choices=_TEMPLATES, default=None)
    p_feas.set_defaults(handler=_cmd_feasibility)

    return parser


def cli(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns 0 ok, 1 config, 2 non-convergence, 3 I/O."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return 0 if exc.code == 0 else 1
    try:
        return args.handler(args)
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli(sys.argv[1:]))
