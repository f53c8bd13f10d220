"""Command-line benchmark harness.

Subcommands:

  run     execute one optimization run from a JSON config
  sweep   execute a parameter sweep and emit a summary table
  oracle  brute-force grid maximization of the configured objective
  verify  run the repository acceptance suite

Config schema (JSON, all blocks except "objective" optional)::

    {
      "schema_version": 1,
      "objective": {"id": "gp", "options": {}},
      "bounds": [[-2.0, 2.0], [-2.0, 2.0]],
      "cfo": {"n_probes": 8, "n_steps": 500, "gamma": 0.5, ...},
      "sweep": {"parameter": "gamma", "start": 0.0, "stop": 1.0, "count": 11},
      "outputs": {"dir": "cfo_out", "fitness": true, "davg": true,
                  "best_probe": true, "probe_snapshots": false,
                  "trajectories": false, "summary": true}
    }

"objective" may also be a bare id string. cfo accepts every CfoConfig field
by name; n_probes defaults to 4 per dimension and n_steps to 500 when
omitted. Exit codes: 0 success, 2 config error, 3 objective or protocol
error, 4 internal invariant violation (verify: 1 when a criterion fails).
"""

from __future__ import annotations

import argparse
import copy
import csv
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .engine import (
    CfoConfig,
    ConfigError,
    EngineError,
    InvariantError,
    RunRecord,
    run,
)
from .objectives import Objective, ObjectiveError, get_objective, list_objectives
from .oracle import grid_oracle
from .space import DecisionSpace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_OBJECTIVE = 3
EXIT_INTERNAL = 4

SWEEP_PARAMETERS = ("gamma", "frep_init", "n_probes", "seed")
EMIT_FLAGS = (
    "fitness",
    "davg",
    "best_probe",
    "probe_snapshots",
    "trajectories",
    "summary",
)
DEFAULT_EMIT = {
    "fitness": True,
    "davg": True,
    "best_probe": True,
    "probe_snapshots": False,
    "trajectories": False,
    "summary": True,
}
DEFAULT_N_STEPS = 500
DEFAULT_PROBES_PER_DIM = 4
DEFAULT_MIN_PROBES = 6


def default_probe_count(n_dims: int) -> int:
    """Documented default: 4 probes per dimension, never fewer than 6."""
    return max(DEFAULT_MIN_PROBES, DEFAULT_PROBES_PER_DIM * n_dims)

_CFO_FIELDS = {f.name for f in dataclasses.fields(CfoConfig)}
_ARRAY_FIELDS = {"initial_probes", "initial_acceleration"}


@dataclass
class RunSpec:
    """A fully validated run description (config file plus CLI overrides)."""

    objective_id: str
    objective_options: dict
    objective: Objective
    space: DecisionSpace
    cfo: CfoConfig
    sweep: Optional[dict]
    out_dir: Path
    emit: Dict[str, bool]


# ---------------------------------------------------------------------------
# config loading


def _require_keys(block: dict, allowed, where: str):
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}")


def _parse_objective_block(raw):
    if isinstance(raw, str):
        return raw, {}
    if isinstance(raw, dict):
        _require_keys(raw, ("id", "options"), "objective")
        if "id" not in raw or not isinstance(raw["id"], str):
            raise ConfigError("objective.id: a string id is required")
        options = raw.get("options", {})
        if not isinstance(options, dict):
            raise ConfigError("objective.options: must be an object")
        return raw["id"], copy.deepcopy(options)
    raise ConfigError("objective: must be an id string or {id, options}")


def _parse_bounds_block(raw):
    if raw is None:
        return None
    if not isinstance(raw, list) or not raw:
        raise ConfigError("bounds: must be a nonempty list of [low, high] pairs")
    pairs = []
    for i, pair in enumerate(raw):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)
        ):
            raise ConfigError(f"bounds[{i}]: expected a [low, high] number pair")
        pairs.append((float(pair[0]), float(pair[1])))
    return pairs


def _coerce_cfo_value(name: str, value):
    if name in _ARRAY_FIELDS:
        if value is None:
            return None
        try:
            return np.asarray(value, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cfo.{name}: not a numeric array ({exc})") from None
    if name == "init_scheme":
        if not isinstance(value, str):
            raise ConfigError("cfo.init_scheme: must be a string")
        return value
    if name in ("early_termination", "perturb_on_oscillation", "keep_history"):
        if value is not None and not isinstance(value, bool):
            raise ConfigError(f"cfo.{name}: must be a boolean")
        return value
    if name == "shrink_interval":
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("cfo.shrink_interval: must be an integer or null")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"cfo.{name}: must be a number")
    if name in ("n_probes", "n_steps", "n_saved", "n_sat", "n_avg_steps",
                "mitigation_seed"):
        if value != int(value):
            raise ConfigError(f"cfo.{name}: must be an integer")
        return int(value)
    return float(value)


def _parse_cfo_block(raw: dict, n_dims: int) -> CfoConfig:
    if not isinstance(raw, dict):
        raise ConfigError("cfo: must be an object")
    _require_keys(raw, _CFO_FIELDS, "cfo")
    kwargs = {name: _coerce_cfo_value(name, value) for name, value in raw.items()}
    kwargs.setdefault("n_probes", default_probe_count(n_dims))
    kwargs.setdefault("n_steps", DEFAULT_N_STEPS)
    return CfoConfig(**kwargs)


def _parse_sweep_block(raw):
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("sweep: must be an object")
    _require_keys(raw, ("parameter", "start", "stop", "count"), "sweep")
    for key in ("parameter", "start", "stop", "count"):
        if key not in raw:
            raise ConfigError(f"sweep.{key}: required")
    parameter = raw["parameter"]
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(
            f"sweep.parameter: {parameter!r} is not one of {list(SWEEP_PARAMETERS)}"
        )
    for key in ("start", "stop"):
        v = raw[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"sweep.{key}: must be a number")
    count = raw["count"]
    if isinstance(count, bool) or not isinstance(count, int):
        raise ConfigError("sweep.count: must be an integer")
    if count < 2:
        raise ConfigError("sweep.count: a sweep needs at least 2 runs")
    return {
        "parameter": parameter,
        "start": float(raw["start"]),
        "stop": float(raw["stop"]),
        "count": count,
    }


def _parse_outputs_block(raw):
    emit = dict(DEFAULT_EMIT)
    out_dir = None
    if raw is None:
        return out_dir, emit
    if not isinstance(raw, dict):
        raise ConfigError("outputs: must be an object")
    _require_keys(raw, ("dir",) + EMIT_FLAGS, "outputs")
    if "dir" in raw:
        if not isinstance(raw["dir"], str) or not raw["dir"]:
            raise ConfigError("outputs.dir: must be a nonempty string")
        out_dir = raw["dir"]
    for flag in EMIT_FLAGS:
        if flag in raw:
            if not isinstance(raw[flag], bool):
                raise ConfigError(f"outputs.{flag}: must be a boolean")
            emit[flag] = raw[flag]
    return out_dir, emit


def _fresh_objective(objective_id: str, options: dict,
                     noise_seed: Optional[int] = None) -> Objective:
    options = copy.deepcopy(options)
    if noise_seed is not None:
        noise = options.get("noise")
        if not isinstance(noise, dict):
            noise = {}
        noise["seed"] = int(noise_seed)
        options["noise"] = noise
    return get_objective(objective_id, **options)


def load_config(path, out_override=None, seed_override=None) -> RunSpec:
    """Parse and validate a JSON config file into a ready-to-run spec."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root: must be a JSON object")
    _require_keys(
        raw,
        ("schema_version", "objective", "bounds", "cfo", "sweep", "outputs"),
        "config root",
    )
    version = raw.get("schema_version", 1)
    if version != 1:
        raise ConfigError(f"schema_version: unsupported version {version!r}")
    if "objective" not in raw:
        raise ConfigError("objective: required")

    objective_id, options = _parse_objective_block(raw["objective"])
    if seed_override is not None:
        noise = options.get("noise")
        if not isinstance(noise, dict):
            noise = {}
        noise["seed"] = int(seed_override)
        options["noise"] = noise
    objective = _fresh_objective(objective_id, options)

    bounds_pairs = _parse_bounds_block(raw.get("bounds"))
    space = (
        DecisionSpace.from_bounds(bounds_pairs)
        if bounds_pairs is not None
        else objective.bounds
    )
    if space.n_dims != objective.n_dims:
        raise ConfigError(
            f"bounds: {space.n_dims} dimensions for a "
            f"{objective.n_dims}-dimensional objective"
        )

    cfg = _parse_cfo_block(raw.get("cfo", {}), space.n_dims)
    sweep = _parse_sweep_block(raw.get("sweep"))
    conf_dir, emit = _parse_outputs_block(raw.get("outputs"))

    if emit["trajectories"] or emit["probe_snapshots"]:
        if cfg.keep_history is False:
            raise ConfigError(
                "outputs: trajectories/probe_snapshots require cfo.keep_history"
            )
        cfg.keep_history = True

    cfg.validate(space)

    out_dir = out_override or os.environ.get("CFO_OUT_DIR") or conf_dir or "cfo_out"
    return RunSpec(
        objective_id=objective_id,
        objective_options=options,
        objective=objective,
        space=space,
        cfo=cfg,
        sweep=sweep,
        out_dir=Path(out_dir),
        emit=emit,
    )


# ---------------------------------------------------------------------------
# output writers


def _write_lines(path: Path, lines: List[str]):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_series(path: Path, series, fmt="%.17g"):
    _write_lines(path, [("%d " + fmt) % (j, v) for j, v in enumerate(series)])


def write_run_files(record: RunRecord, out_dir: Path, emit: Dict[str, bool],
                    n_dims: int):
    out_dir.mkdir(parents=True, exist_ok=True)
    if emit.get("fitness"):
        _write_series(out_dir / "fitness.txt", record.step_best_fitness)
    if emit.get("davg"):
        _write_series(out_dir / "davg.txt", record.d_avg)
    if emit.get("best_probe"):
        _write_series(out_dir / "best_probe.txt", record.best_probe, fmt="%d")
    if emit.get("probe_snapshots") and n_dims == 2:
        if record.positions_history is None:
            raise ConfigError("probe_snapshots requested but no history was kept")
        snap_dir = out_dir / "probes"
        for j in range(record.positions_history.shape[0]):
            rows = [
                " ".join("%.17g" % v for v in point)
                for point in record.positions_history[j]
            ]
            _write_lines(snap_dir / ("step_%04d.txt" % j), rows)
    if emit.get("trajectories"):
        if record.positions_history is None:
            raise ConfigError("trajectories requested but no history was kept")
        traj_dir = out_dir / "trajectories"
        n_probes = record.positions_history.shape[1]
        for p in range(n_probes):
            rows = [
                ("%d " % j)
                + " ".join("%.17g" % v for v in record.positions_history[j, p])
                for j in range(record.positions_history.shape[0])
            ]
            _write_lines(traj_dir / ("probe_%02d.txt" % (p + 1)), rows)
    (out_dir / "record.json").write_text(record.to_json() + "\n", encoding="utf-8")


def _summary_rows(records: List[RunRecord], values: List, cfgs: List[CfoConfig],
                  n_dims: int) -> List[dict]:
    rows = []
    for i, (record, value, cfg) in enumerate(zip(records, values, cfgs)):
        steps = record.saturation_step
        rows.append(
            {
                "run": i + 1,
                "value": value,
                "n_steps": cfg.n_steps,
                "n_dims": n_dims,
                "n_probes": cfg.n_probes,
                "g": cfg.g,
                "delta_t": cfg.delta_t,
                "alpha": cfg.alpha,
                "beta": cfg.beta,
                "steps": steps,
                "n_eval": (steps + 1) * cfg.n_probes,
                "frep_final": record.frep[-1],
                "best_fitness": record.final_best_fitness,
            }
        )
    return rows


def _format_point(point) -> str:
    return "(" + ", ".join("%.8g" % v for v in np.asarray(point).ravel()) + ")"


def write_summary(out_dir: Path, rows: List[dict], records: List[RunRecord],
                  param_label: str):
    """Emit summary.csv plus the fixed-width human table summary.txt."""
    out_dir.mkdir(parents=True, exist_ok=True)
    header = [
        "run", param_label, "n_steps", "n_dims", "n_probes", "g", "delta_t",
        "alpha", "beta", "steps", "n_eval", "frep_final", "best_fitness",
    ]
    with open(out_dir / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    row["run"],
                    "" if row["value"] is None else "%.17g" % row["value"],
                    row["n_steps"],
                    row["n_dims"],
                    row["n_probes"],
                    "%.17g" % row["g"],
                    "%.17g" % row["delta_t"],
                    "%.17g" % row["alpha"],
                    "%.17g" % row["beta"],
                    row["steps"],
                    row["n_eval"],
                    "%.17g" % row["frep_final"],
                    "%.17g" % row["best_fitness"],
                ]
            )

    widths = (5, 13, 7, 4, 5, 8, 8, 8, 8, 7, 9, 9, 20)
    names = ("Run", param_label, "Nt", "Nd", "Np", "G", "DelT", "Alpha",
             "Beta", "Steps", "Neval", "Frep", "Fitness")
    lines = ["".join(name.rjust(w) for name, w in zip(names, widths))]
    for row in rows:
        value_txt = "-" if row["value"] is None else "%.7g" % row["value"]
        cells = (
            "%d" % row["run"],
            value_txt,
            "%d" % row["n_steps"],
            "%d" % row["n_dims"],
            "%d" % row["n_probes"],
            "%.3f" % row["g"],
            "%.3f" % row["delta_t"],
            "%.3f" % row["alpha"],
            "%.3f" % row["beta"],
            "%d" % row["steps"],
            "%d" % row["n_eval"],
            "%.4f" % row["frep_final"],
            "%.10g" % row["best_fitness"],
        )
        lines.append("".join(cell.rjust(w) for cell, w in zip(cells, widths)))

    best_i = max(range(len(rows)), key=lambda i: rows[i]["best_fitness"])
    best_row = rows[best_i]
    best_record = records[best_i]
    lines.append("")
    if best_row["value"] is None:
        label = "Best run: %d" % best_row["run"]
    else:
        label = "Best run: %d (%s = %.7g)" % (
            best_row["run"], param_label, best_row["value"],
        )
    lines.append(
        "%s  Fitness = %.10g  at %s"
        % (label, best_row["best_fitness"], _format_point(best_record.best_point))
    )
    total = sum(row["n_eval"] for row in rows)
    lines.append("Total Function Evaluations: %d" % total)
    _write_lines(out_dir / "summary.txt", lines)
    return best_i, total


# ---------------------------------------------------------------------------
# run / sweep execution


def _result_line(name: str, record: RunRecord, n_probes: int) -> str:
    steps = record.saturation_step
    return (
        "%s: best %.10g at %s; saturation step %d; n_eval %d; %s"
        % (
            name,
            record.final_best_fitness,
            _format_point(record.best_point),
            steps,
            (steps + 1) * n_probes,
            record.termination_reason,
        )
    )


def run_benchmark(spec: RunSpec, quiet: bool = False) -> RunRecord:
    """Execute a single configured run and write its output files."""
    try:
        record = run(spec.cfo, spec.space, spec.objective)
    finally:
        closer = getattr(spec.objective, "close", None)
        if closer is not None:
            closer()
    write_run_files(record, spec.out_dir, spec.emit, spec.space.n_dims)
    if spec.emit.get("summary"):
        rows = _summary_rows([record], [None], [spec.cfo], spec.space.n_dims)
        write_summary(spec.out_dir, rows, [record], "Param")
    if not quiet:
        print(_result_line(spec.objective_id, record, spec.cfo.n_probes))
    return record


def _sweep_values(sweep: dict) -> List:
    grid = np.linspace(sweep["start"], sweep["stop"], sweep["count"])
    if sweep["parameter"] in ("n_probes", "seed"):
        return [int(round(v)) for v in grid]
    return [float(v) for v in grid]


def _sweep_run_config(spec: RunSpec, parameter: str, value):
    cfg = dataclasses.replace(spec.cfo)
    if parameter == "gamma":
        cfg.gamma = float(value)
    elif parameter == "frep_init":
        cfg.frep_init = float(value)
    elif parameter == "n_probes":
        cfg.n_probes = int(value)
    cfg.validate(spec.space)
    return cfg


def sweep_runs(spec: RunSpec, jobs: int = 1, quiet: bool = False):
    """Run the configured sweep; returns (records, summary rows)."""
    if spec.sweep is None:
        raise ConfigError("sweep: the config has no sweep block")
    parameter = spec.sweep["parameter"]
    values = _sweep_values(spec.sweep)
    if parameter == "seed" and not isinstance(
        spec.objective_options.get("noise"), dict
    ):
        raise ConfigError(
            "sweep.parameter: a seed sweep needs a noise block in "
            "objective.options"
        )

    cfgs = [_sweep_run_config(spec, parameter, v) for v in values]
    pad = max(2, len(str(len(values))))

    def one_run(index: int) -> RunRecord:
        value = values[index]
        if parameter == "seed":
            objective = _fresh_objective(
                spec.objective_id, spec.objective_options, noise_seed=value
            )
        else:
            objective = _fresh_objective(spec.objective_id, spec.objective_options)
        try:
            record = run(cfgs[index], spec.space, objective)
        finally:
            closer = getattr(objective, "close", None)
            if closer is not None:
                closer()
        run_dir = spec.out_dir / ("run_%0*d" % (pad, index + 1))
        per_run_emit = dict(spec.emit, summary=False)
        write_run_files(record, run_dir, per_run_emit, spec.space.n_dims)
        return record

    if jobs <= 1:
        records = [one_run(i) for i in range(len(values))]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(one_run, i) for i in range(len(values))]
            # collect strictly in run order so output is deterministic
            records = [f.result() for f in futures]

    rows = _summary_rows(records, values, cfgs, spec.space.n_dims)
    param_label = {"gamma": "Gamma", "frep_init": "FrepInit",
                   "n_probes": "Nprobes", "seed": "Seed"}[parameter]
    best_i, total = write_summary(spec.out_dir, rows, records, param_label)
    if not quiet:
        for value, record, cfg in zip(values, records, cfgs):
            name = "%s[%s=%.7g]" % (spec.objective_id, parameter, value)
            print(_result_line(name, record, cfg.n_probes))
        print(
            "best run %d (%s = %.7g): fitness %.10g at %s"
            % (
                best_i + 1,
                parameter,
                values[best_i],
                records[best_i].final_best_fitness,
                _format_point(records[best_i].best_point),
            )
        )
        print("total function evaluations: %d" % total)
    return records, rows


def oracle_command(spec: RunSpec, resolution, quiet: bool = False):
    """Grid-maximize the configured objective and write oracle.json."""
    result = grid_oracle(spec.objective, bounds=spec.space, resolution=resolution)
    closer = getattr(spec.objective, "close", None)
    if closer is not None:
        closer()
    payload = {
        "objective": spec.objective_id,
        "argmax": [float(v) for v in result.argmax],
        "value": result.value,
        "resolution": list(result.resolution),
        "n_evaluations": result.n_evaluations,
    }
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    (spec.out_dir / "oracle.json").write_text(
        json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )
    if not quiet:
        print(
            "oracle max %.10g at %s (%s grid, %d evaluations)"
            % (
                result.value,
                _format_point(result.argmax),
                "x".join(str(n) for n in result.resolution),
                result.n_evaluations,
            )
        )
    return result


# ---------------------------------------------------------------------------
# entry point


def _parse_resolution(text: str):
    parts = [p for p in text.split(",") if p]
    try:
        counts = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(
            f"--resolution: expected an integer or comma-separated integers, got {text!r}"
        ) from None
    if not counts:
        raise ConfigError("--resolution: empty")
    return counts[0] if len(counts) == 1 else counts


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfo-bench",
        description="deterministic CFO benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_seed=True):
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", help="output directory (overrides config and CFO_OUT_DIR)")
        if with_seed:
            p.add_argument(
                "--seed",
                type=int,
                help="override the objective noise seed",
            )
        p.add_argument("--quiet", action="store_true", help="suppress result lines")

    p_run = sub.add_parser("run", help="execute one run")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="execute the configured parameter sweep")
    add_common(p_sweep)
    p_sweep.add_argument(
        "--jobs", type=int, default=1, help="parallel runs (default 1)"
    )

    p_oracle = sub.add_parser("oracle", help="grid-maximize the configured objective")
    add_common(p_oracle, with_seed=False)
    p_oracle.add_argument(
        "--resolution",
        default="101",
        help="grid points per axis, an integer or comma-separated per-axis list",
    )

    p_verify = sub.add_parser("verify", help="run the acceptance suite")
    p_verify.add_argument("--quiet", action="store_true",
                          help="print only the final verdict")

    p_list = sub.add_parser("objectives", help="list registered objective ids")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "objectives":
            for obj_id in list_objectives():
                print(obj_id)
            return EXIT_OK
        if args.command == "verify":
            from .acceptance import run_all

            results = run_all(quiet=args.quiet)
            return EXIT_OK if all(r.passed for r in results) else 1
        spec = load_config(
            args.config,
            out_override=args.out,
            seed_override=getattr(args, "seed", None),
        )
        if args.command == "run":
            run_benchmark(spec, quiet=args.quiet)
        elif args.command == "sweep":
            sweep_runs(spec, jobs=args.jobs, quiet=args.quiet)
        elif args.command == "oracle":
            oracle_command(
                spec, _parse_resolution(args.resolution), quiet=args.quiet
            )
        return EXIT_OK
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except EngineError as exc:
        print(f"objective error: {exc}", file=sys.stderr)
        return EXIT_OBJECTIVE
    except (ConfigError, ObjectiveError, ValueError) as exc:
        # external-protocol failures subclass ObjectiveError but are runtime
        # faults, not config mistakes; give them the objective exit code
        from .external import ExternalObjectiveError

        if isinstance(exc, ExternalObjectiveError):
            print(f"objective error: {exc}", file=sys.stderr)
            return EXIT_OBJECTIVE
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
