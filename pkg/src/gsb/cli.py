"""Command-line experiment runner.

``gsb run`` executes one prequential run and writes a results CSV,
``gsb sweep`` runs the Cartesian product of parameter lists, and
``gsb generate`` writes a synthetic drift stream in the text stream format.

Settings are resolved in increasing priority: built-in defaults, a
``--config`` file (JSON or YAML), ``GSB_*`` environment variables, then
command-line flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from .budget import PolicyConfig
from .evaluation import EvalConfig, RunResult, run_prequential
from .kernels import FeatureIndex, KernelConfig
from .learners import PRIMAL, LearnerConfig, make_model
from .stream import DriftStreamConfig, read_stream, generate_drift_stream, write_stream

SCHEMA = "gsb-results/1"
COLUMNS = ("kind", "t", "auroc", "balanced_accuracy", "cumulative_errors", "model_size", "elapsed_ns")
ELAPSED_COLUMNS = ("elapsed_ns",)
ENV_PREFIX = "GSB_"


class UsageError(ValueError):
    """Bad configuration; reported without running anything."""


@dataclass(frozen=True)
class RunSpec:
    kernel: str = "fs"
    h: int = 1
    d: int = 1
    lam: float = 1.0
    algo: str = PRIMAL
    policy: str | None = None  # None picks weight for primal, oldest otherwise
    budget: float = math.inf
    C: float = 0.01
    seed: int = 0
    stream: str | None = None
    synthetic: Any = None  # path, inline JSON text, or an already-parsed mapping
    eval_every: int = 50
    window: int = 1000
    normalize: bool = False
    out: str | None = None

    def learner_config(self) -> LearnerConfig:
        policy = self.policy or ("weight" if self.algo == PRIMAL else "oldest")
        kcfg = KernelConfig(self.kernel, h=self.h, d=self.d, lam=self.lam, normalize=self.normalize)
        return LearnerConfig(self.algo, PolicyConfig(policy, seed=self.seed), self.budget, self.C, kernel=kcfg)

    def eval_config(self) -> EvalConfig:
        return EvalConfig(self.eval_every, self.window)

    def validate(self) -> None:
        try:
            self.learner_config()
            self.eval_config()
        except (ValueError, TypeError) as e:
            raise UsageError(str(e)) from None
        if (self.stream is None) == (self.synthetic is None):
            raise UsageError("exactly one of --stream and --synthetic is required")


def parse_budget(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinite", "infinity"):
            return math.inf
        try:
            value = int(value)
        except ValueError:
            raise UsageError(f"budget must be a positive integer or 'inf', got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UsageError(f"budget must be a positive integer or 'inf', got {value!r}")
    if value != math.inf and value != int(value):
        raise UsageError(f"budget must be a positive integer or 'inf', got {value!r}")
    return value if value == math.inf else int(value)


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    s = str(value).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {value!r}")


_CONVERT = {
    "kernel": str,
    "h": int,
    "d": int,
    "lam": float,
    "algo": str,
    "policy": str,
    "budget": parse_budget,
    "C": float,
    "seed": int,
    "stream": str,
    "synthetic": lambda v: v,
    "eval_every": int,
    "window": int,
    "normalize": _parse_bool,
    "out": str,
}
# accepted spellings in config files and environment variables
_ALIASES = {"lambda": "lam", "algorithm": "algo", "eval-every": "eval_every", "c": "C"}


def _field_name(key: str) -> str:
    key = _ALIASES.get(key, _ALIASES.get(key.lower(), key))
    if key not in _CONVERT:
        key = key.lower().replace("-", "_")
        key = _ALIASES.get(key, key)
    if key not in _CONVERT:
        raise UsageError(f"unknown setting {key!r}")
    return key


def coerce(values: Mapping[str, Any]) -> dict:
    out = {}
    for key, v in values.items():
        name = _field_name(key)
        try:
            out[name] = None if v is None else _CONVERT[name](v)
        except (TypeError, ValueError) as e:
            raise UsageError(f"bad value for {name}: {v!r}") from e
    return out


def load_mapping(path) -> Any:
    """Read a JSON or YAML file (chosen by extension; YAML is the fallback)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        if str(path).endswith(".json"):
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise UsageError(f"cannot parse {path}: {e}") from None


def env_settings(environ: Mapping[str, str]) -> dict:
    found = {}
    for key, v in environ.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX) :]
            try:
                found[_field_name(name)] = v
            except UsageError:
                continue  # unrelated GSB_* variables are ignored
    return coerce(found)


def resolve_spec(flags: Mapping[str, Any], config_path=None, environ: Mapping[str, str] | None = None, validate=True) -> RunSpec:
    """Merge defaults < config file < environment < flags."""
    merged: dict = {}
    if config_path:
        data = load_mapping(config_path)
        if not isinstance(data, dict):
            raise UsageError(f"{config_path}: expected a mapping of settings")
        merged.update(coerce(data))
    merged.update(env_settings(os.environ if environ is None else environ))
    merged.update(coerce({k: v for k, v in flags.items() if v is not None}))
    spec = RunSpec(**merged)
    if validate:
        spec.validate()
    return spec


# --- streams -------------------------------------------------------------------


def synthetic_config(source, seed: int) -> DriftStreamConfig:
    if isinstance(source, Mapping):
        data = dict(source)
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise UsageError(f"bad inline generator config: {e}") from None
    else:
        data = load_mapping(source)
    if not isinstance(data, dict) or "segments" not in data:
        raise UsageError("generator config needs a 'segments' list")
    data.setdefault("seed", seed)
    try:
        return DriftStreamConfig.from_dict(data)
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad generator config: {e}") from None


def load_examples(spec: RunSpec):
    if spec.stream is not None:
        try:
            return read_stream(spec.stream)
        except OSError as e:
            raise UsageError(f"cannot read {spec.stream}: {e.strerror}") from None
    return generate_drift_stream(synthetic_config(spec.synthetic, spec.seed))


# --- results CSV ---------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_results(result: RunResult) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in result.records:
        w.writerow(["record", r.t, *map(_fmt, (r.auroc_window, r.balanced_accuracy_window)), r.cumulative_errors, r.model_size, r.elapsed_ns])
    s = result.summary
    w.writerow(["summary", s.n_examples, _fmt(s.mean_auroc), _fmt(s.mean_balanced_accuracy), s.total_errors, s.final_model_size, s.total_ns])
    return buf.getvalue()


class SchemaError(ValueError):
    pass


def read_results(text: str) -> list[dict]:
    """Parse and validate a results CSV; the summary row is last."""
    lines = text.splitlines()
    if not lines or lines[0] != f"# schema: {SCHEMA}":
        raise SchemaError(f"missing or unknown schema line (want {SCHEMA})")
    rows = list(csv.reader(lines[1:]))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise SchemaError(f"header must be {','.join(COLUMNS)}")
    out = []
    for i, row in enumerate(rows[1:], 3):
        if len(row) != len(COLUMNS):
            raise SchemaError(f"line {i}: expected {len(COLUMNS)} fields")
        rec = dict(zip(COLUMNS, row))
        if rec["kind"] not in ("record", "summary"):
            raise SchemaError(f"line {i}: unknown kind {rec['kind']!r}")
        try:
            for k in ("t", "cumulative_errors", "model_size", "elapsed_ns"):
                rec[k] = int(rec[k])
            for k in ("auroc", "balanced_accuracy"):
                rec[k] = float(rec[k]) if rec[k] else None
        except ValueError as e:
            raise SchemaError(f"line {i}: {e}") from None
        for k in ("auroc", "balanced_accuracy"):
            if rec[k] is not None and not 0.0 <= rec[k] <= 1.0:
                raise SchemaError(f"line {i}: {k} outside [0, 1]")
        out.append(rec)
    kinds = [r["kind"] for r in out]
    if kinds.count("summary") != 1 or kinds[-1] != "summary":
        raise SchemaError("exactly one trailing summary row is required")
    return out


def atomic_write(path, text: str) -> None:
    """Write via a temporary sibling file so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def execute(spec: RunSpec) -> str:
    """Run one RunSpec and return the CSV text. Each run gets its own feature index."""
    examples = load_examples(spec)
    model = make_model(spec.learner_config(), FeatureIndex())
    return format_results(run_prequential(examples, model, spec.eval_config()))


# --- sweeps --------------------------------------------------------------------


def default_grid() -> list[dict]:
    """Kernel parameter grids crossed with C values, one block per kernel."""
    C = [0.01, 0.1, 1.0]
    return [
        {"kernel": ["fs"], "h": list(range(9)), "C": C},
        {"kernel": ["nspdk"], "d": list(range(1, 7)), "h": list(range(1, 5)), "C": C},
        {"kernel": ["odd"], "lam": [0.8, 1.0, 1.2, 1.4, 1.6, 1.8], "h": list(range(1, 5)), "C": C},
    ]


def expand_grid(grid) -> list[dict]:
    """Cartesian product of each block's lists; a list of blocks is their union."""
    blocks = grid if isinstance(grid, list) else [grid]
    combos = []
    for block in blocks:
        if not isinstance(block, dict):
            raise UsageError("a grid is a mapping of setting -> list of values, or a list of such mappings")
        keys = list(block)
        lists = []
        for k in keys:
            v = block[k]
            v = list(v) if isinstance(v, (list, tuple)) else [v]
            if not v:
                raise UsageError(f"grid entry {k!r} has no values")
            lists.append(v)
        if not keys:
            continue
        for values in itertools.product(*lists):
            combos.append(coerce(dict(zip(keys, values))))
    if not combos:
        raise UsageError("the grid is empty")
    return combos


def _sweep_one(job):
    i, base, params, out_dir = job
    name = f"run-{i:04d}.csv"
    try:
        spec = replace(base, **params)
        spec.validate()
        atomic_write(Path(out_dir) / name, execute(spec))
        return i, "ok", "", name
    except Exception as e:  # recorded in the index; other runs continue
        return i, "error", f"{type(e).__name__}: {e}", ""


def sweep(base: RunSpec, grid, out_dir, jobs: int = 1) -> list[tuple]:
    combos = expand_grid(grid)
    work = [(i, base, params, str(out_dir)) for i, params in enumerate(combos)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, work))
    else:
        results = [_sweep_one(w) for w in work]
    params = sorted({k for c in combos for k in c})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run", "status", "error", "file", *params])
    for (i, status, err, name), combo in zip(results, combos):
        w.writerow([i, status, err, name, *(_fmt(combo.get(k)) for k in params)])
    atomic_write(Path(out_dir) / "index.csv", buf.getvalue())
    return results


# --- argument parsing ------------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    # defaults are None so that unset flags fall through to env/config/defaults
    p.add_argument("--config", help="JSON or YAML file of settings")
    p.add_argument("--kernel", choices=["fs", "nspdk", "odd"])
    p.add_argument("--h", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--algo", choices=["dual", "mixed", "primal"])
    p.add_argument("--policy", choices=["random", "oldest", "tau", "weight", "oldest-feature", "fscore"])
    p.add_argument("--budget", help="positive integer or 'inf'")
    p.add_argument("--C", type=float)
    p.add_argument("--seed", type=int)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--stream", help="stream file")
    src.add_argument("--synthetic", help="generator config file or inline JSON")
    p.add_argument("--eval-every", dest="eval_every", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--normalize", action="store_const", const=True, default=None)


RUN_KEYS = ("kernel", "h", "d", "lam", "algo", "policy", "budget", "C", "seed", "stream", "synthetic", "eval_every", "window", "normalize")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsb", description="Budgeted online classification of graph streams.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one prequential run, results as CSV")
    _add_run_flags(run)
    run.add_argument("--out", help="CSV path (default: standard output)")

    sw = sub.add_parser("sweep", help="run every combination of a parameter grid")
    _add_run_flags(sw)
    g = sw.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", help="JSON or YAML grid file")
    g.add_argument("--default-grid", action="store_true", help="the standard kernel and C grids")
    sw.add_argument("--out", required=True, help="output directory")
    sw.add_argument("--jobs", type=int, default=1)

    gen = sub.add_parser("generate", help="write a synthetic drift stream")
    gen.add_argument("--synthetic", required=True, help="generator config file or inline JSON")
    gen.add_argument("--seed", type=int, default=0, help="used when the config has no seed")
    gen.add_argument("--out", help="stream path (default: standard output)")
    return parser


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None, environ: Mapping[str, str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            cfg = synthetic_config(args.synthetic, args.seed)
            _emit(write_stream(generate_drift_stream(cfg)), args.out)
            return 0
        flags = {k: getattr(args, k) for k in RUN_KEYS}
        if args.command == "run":
            flags["out"] = args.out
            spec = resolve_spec(flags, args.config, environ)
            _emit(execute(spec), spec.out)
            return 0
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        grid = default_grid() if args.default_grid else load_mapping(args.grid)
        expand_grid(grid)  # an empty grid is a usage error before anything runs
        # grid values may complete the base settings, so each run validates itself
        base = resolve_spec(flags, args.config, environ, validate=False)
        results = sweep(base, grid, args.out, args.jobs)
        failed = sum(r[1] != "ok" for r in results)
        if failed:
            print(f"gsb: {failed} of {len(results)} runs failed; see {Path(args.out) / 'index.csv'}", file=sys.stderr)
            return 1
        return 0
    except UsageError as e:
        print(f"gsb: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"gsb: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
