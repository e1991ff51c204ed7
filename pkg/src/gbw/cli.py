"""``gbw`` command line: run JSON experiment configs and query single quantities.

Exit codes: 0 success (every check passed), 1 a check failed, 2 invalid input,
3 an enumeration limit was hit while running.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .constants import ConstantKind, SearchBudget, estimate_constant
from .error_oracles import SigmaKind, gamma_with_witness, sigma_with_witness
from .greedy_core import GreedyOrdering, truncate
from .harness import CONSTRUCTIONS, RELATIONS, check_construction, check_relation
from .sequence_space import (
    SPACE_REGISTRY,
    CoeffVector,
    EnumerationOverflow,
    SpaceSpec,
    eval_norm,
    named_space,
    space_from_json,
    space_to_json,
)

log = logging.getLogger("gbw")

CSV_COLUMNS = ("task_id", "space", "operation", "params_json", "value", "witness_json", "elapsed_ms")
OPERATIONS = ("norm", "gamma", "sigma", "constant", "check", "truncation")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Task:
    task_id: str
    operation: str
    space_name: str
    space: SpaceSpec | None
    params: dict


@dataclass
class ExperimentConfig:
    spaces: dict[str, SpaceSpec]
    tasks: list[Task]
    output_dir: Path = Path("gbw_out")
    seed: int = 0
    max_support: int | None = None


@dataclass
class TaskResult:
    row: dict
    failed_check: str | None = None
    summary: str = ""


# -- parsing ---------------------------------------------------------------------

def resolve_space(ref: Any, dim_cap: int | None = None) -> SpaceSpec:
    """A registry name, a SpaceSpec JSON object, or a path to a JSON file holding one."""
    if isinstance(ref, str):
        if ref in SPACE_REGISTRY:
            return named_space(ref, dim_cap or 64)
        p = Path(ref)
        if p.suffix == ".json" or p.exists():
            try:
                data = json.loads(p.read_text())
            except FileNotFoundError:
                raise ConfigError(f"space file {ref!r} not found") from None
            except json.JSONDecodeError as e:
                raise ConfigError(f"{ref}:{e.lineno}:{e.colno}: {e.msg}") from None
            return resolve_space(data, dim_cap)
        raise ConfigError(f"unknown space {ref!r}; known names: {sorted(SPACE_REGISTRY)}")
    if isinstance(ref, Mapping):
        if "name" in ref and "kind" not in ref:
            return resolve_space(ref["name"], ref.get("dim_cap", dim_cap))
        return space_from_json(ref)
    raise ConfigError(f"space must be a name or an object, got {type(ref).__name__}")


def _field(where: str, fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        msg = e.args[0] if e.args else str(e)
        raise ConfigError(f"{where}: {msg}") from None


def parse_config(data: Mapping) -> ExperimentConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config root must be a JSON object")
    spaces: dict[str, SpaceSpec] = {}
    for name, spec in (data.get("spaces") or {}).items():
        spaces[name] = _field(f"spaces.{name}", resolve_space, spec)
    if "space" in data:
        spaces["default"] = _field("space", resolve_space, data["space"])
    raw_tasks = data.get("tasks")
    if not isinstance(raw_tasks, list) or not raw_tasks:
        raise ConfigError("tasks: expected a nonempty list")
    tasks, seen = [], set()
    for i, t in enumerate(raw_tasks):
        where = f"tasks[{i}]"
        if not isinstance(t, Mapping):
            raise ConfigError(f"{where}: expected an object")
        op = t.get("op")
        if op not in OPERATIONS:
            raise ConfigError(f"{where}.op: expected one of {OPERATIONS}, got {op!r}")
        tid = str(t.get("id", f"t{i + 1}"))
        if tid in seen:
            raise ConfigError(f"{where}.id: duplicate task id {tid!r}")
        seen.add(tid)
        params = {k: v for k, v in t.items() if k not in ("op", "id", "space")}
        sref = t.get("space", "default" if "default" in spaces else None)
        if isinstance(sref, str) and sref in spaces:
            sname, space = sref, spaces[sref]
        elif sref is not None:
            space = _field(f"{where}.space", resolve_space, sref)
            sname = sref if isinstance(sref, str) else space.label
        elif op == "check" and params.get("name") in CONSTRUCTIONS:
            sname, space = params["name"], None
        else:
            raise ConfigError(f"{where}.space: task references no defined space")
        tasks.append(Task(tid, op, sname, space, params))
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed: expected an integer")
    return ExperimentConfig(spaces, tasks, Path(data.get("output_dir", "gbw_out")), seed)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config ({e.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    return parse_config(data)


# -- task execution -----------------------------------------------------------------

def _budget(params: Mapping, max_support: int | None, where: str) -> SearchBudget:
    b = _field(f"{where}.budget", SearchBudget.from_json, params.get("budget", {}))
    if max_support is not None:
        b = replace(b, max_support=max_support)
    return b


def _vector(space: SpaceSpec, params: Mapping, where: str, key: str = "x") -> CoeffVector:
    if key not in params:
        raise ConfigError(f"{where}.{key}: missing")
    return _field(f"{where}.{key}", CoeffVector.from_json, params[key], space.dim_cap)


def run_task(task: Task, seed: int, max_support: int | None) -> TaskResult:
    where = f"task {task.task_id}"
    p = task.params
    sp = task.space
    witness: Any = None
    failed = None
    summary = ""
    if task.operation == "norm":
        value = eval_norm(sp, _vector(sp, p, where))
    elif task.operation == "gamma":
        value, L = gamma_with_witness(sp, _vector(sp, p, where), int(p.get("m", 0)))
        witness = {"Lambda": list(L)}
    elif task.operation == "sigma":
        order = p.get("ordering")
        kind = _field(f"{where}.kind", SigmaKind, p.get("kind", "Best"),
                      GreedyOrdering(tuple(order)) if order is not None else None)
        value, A = sigma_with_witness(sp, kind, _vector(sp, p, where), int(p.get("m", 0)))
        witness = {"A": list(A)}
    elif task.operation == "constant":
        kind = _field(f"{where}.kind", ConstantKind.parse, str(p.get("kind", "")), p.get("lambda"))
        est = estimate_constant(sp, kind, _budget(p, max_support, where))
        value, witness = est.value, est.to_json()
        summary = f"{kind} >= {est.value:.6g}"
    elif task.operation == "truncation":
        value, witness = _truncation_task(sp, p, seed)
        summary = f"truncation max ratio {value:.6g}"
        if value > 1 + 1e-9:
            failed = task.task_id
    else:  # check
        name = p.get("name")
        budget = _budget(p, max_support, where)
        if name in CONSTRUCTIONS:
            report = _field(where, check_construction, name, p.get("params", {}), budget)
        elif name in RELATIONS:
            report = _field(where, check_relation, name, sp, budget, float(p.get("lambda", 1.0)))
        else:
            raise ConfigError(f"{where}.name: unknown check {name!r}")
        value, witness = (1.0 if report.passed else 0.0), report.to_json()
        summary = f"{name}: {'passed' if report.passed else 'FAILED'} ({report.instances_checked} instances)"
        if not report.passed:
            failed = name
    row = {
        "task_id": task.task_id,
        "space": task.space_name,
        "operation": task.operation,
        "params_json": _dumps(p),
        "value": repr(float(value)),
        "witness_json": _dumps(witness),
        "elapsed_ms": "",
    }
    return TaskResult(row, failed, summary or f"{task.operation} = {float(value):.6g}")


def _truncation_task(space: SpaceSpec, p: Mapping, seed: int):
    """Largest ||T_a x|| / ||x|| over seeded random samples."""
    rng = np.random.default_rng(seed)
    n = int(p.get("samples", 1000))
    size = int(p.get("max_support", min(8, space.dim_cap)))
    worst, arg = 0.0, None
    for _ in range(n):
        s = int(rng.integers(1, size + 1))
        idx = sorted(int(i) for i in rng.choice(np.arange(1, space.dim_cap + 1), size=s, replace=False))
        vals = rng.uniform(-2, 2, size=s)
        x = CoeffVector.from_dict({i: float(v) for i, v in zip(idx, vals) if v != 0}, space.dim_cap)
        alpha = float(rng.uniform(0.05, 2.0))
        nx = eval_norm(space, x)
        if nx == 0:
            continue
        r = eval_norm(space, truncate(x, alpha)) / nx
        if r > worst:
            worst, arg = r, {"x": x.to_json(), "alpha": alpha}
    return worst, arg


def _write_atomic(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def run(config: ExperimentConfig, jobs: int = 1, timing: bool = False, quiet: bool = False) -> int:
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)

    def one(task: Task) -> TaskResult:
        t0 = time.perf_counter()
        res = run_task(task, config.seed, config.max_support)
        if timing:
            res.row["elapsed_ms"] = f"{(time.perf_counter() - t0) * 1000:.1f}"
        _write_atomic(out / f"{task.task_id}.csv", _csv_text([res.row]))
        return res

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(one, config.tasks))
    _write_atomic(out / "summary.csv", _csv_text([r.row for r in results]))
    failed = [r.failed_check for r in results if r.failed_check]
    lines = [f"{r.row['task_id']}: {r.summary}" for r in results]
    lines.append("overall: " + ("passed" if not failed else "FAILED (" + ", ".join(failed) + ")"))
    _write_atomic(out / "summary.txt", "\n".join(lines) + "\n")
    if not quiet:
        print("\n".join(lines))
    for name in failed:
        print(f"check failed: {name}", file=sys.stderr)
    return 1 if failed else 0


# -- entry point ---------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gbw", description="Greedy-basis workbench")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run a JSON experiment config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides the config)")
    r.add_argument("--seed", type=int)
    r.add_argument("--max-support", type=int, help="override every task budget's max_support")
    r.add_argument("--quiet", action="store_true")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--timing", action="store_true", help="fill elapsed_ms (output is then not byte-stable)")

    d = sub.add_parser("describe", help="print the definition of a named space")
    d.add_argument("space")

    c = sub.add_parser("constants", help="estimate one constant")
    c.add_argument("space", help="registry name or SpaceSpec JSON file")
    c.add_argument("--kind", required=True)
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--budget", help="SearchBudget as inline JSON or a file")
    c.add_argument("--max-support", type=int)
    c.add_argument("--dim-cap", type=int)

    k = sub.add_parser("check", help="run one construction or relation check")
    k.add_argument("name", choices=CONSTRUCTIONS + RELATIONS)
    k.add_argument("--space", help="registry name or SpaceSpec JSON file (relation checks)")
    k.add_argument("--lambda", dest="lam", type=float, default=1.0)
    k.add_argument("--budget")
    k.add_argument("--params", help="construction parameters as inline JSON or a file")
    return ap


def _json_arg(text: str | None, what: str) -> dict:
    if not text:
        return {}
    try:
        return json.loads(Path(text).read_text() if Path(text).is_file() else text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{what}:{e.lineno}:{e.colno}: {e.msg}") from None


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cmd == "describe":
            if args.space not in SPACE_REGISTRY:
                raise ConfigError(f"unknown space {args.space!r}; known: {sorted(SPACE_REGISTRY)}")
            print(f"{args.space}: {SPACE_REGISTRY[args.space][0]}")
            return 0
        if args.cmd == "run":
            cfg = load_config(args.config)
            if args.out:
                cfg.output_dir = Path(args.out)
            if args.seed is not None:
                cfg.seed = args.seed
            cfg.max_support = args.max_support
            return run(cfg, jobs=args.jobs, timing=args.timing, quiet=args.quiet)
        if args.cmd == "constants":
            space = _field("space", resolve_space, args.space, args.dim_cap)
            budget = _field("budget", SearchBudget.from_json, _json_arg(args.budget, "budget"))
            if args.max_support is not None:
                budget = replace(budget, max_support=args.max_support)
            kind = _field("kind", ConstantKind.parse, args.kind, args.lam)
            print(_dumps(estimate_constant(space, kind, budget).to_json()))
            return 0
        # check
        budget = _field("budget", SearchBudget.from_json, _json_arg(args.budget, "budget"))
        if args.name in CONSTRUCTIONS:
            report = _field(args.name, check_construction, args.name, _json_arg(args.params, "params"), budget)
        else:
            if not args.space:
                raise ConfigError(f"{args.name}: --space is required for relation checks")
            space = _field("space", resolve_space, args.space)
            report = _field(args.name, check_relation, args.name, space, budget, args.lam)
        print(_dumps(report.to_json()))
        if not report.passed:
            print(f"check failed: {args.name}", file=sys.stderr)
            return 1
        return 0
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EnumerationOverflow as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
