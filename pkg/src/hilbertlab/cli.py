"""Command-line sweeps over sequences, pole sums and permutation systems.

Every subcommand writes one CSV per input (plus a combined CSV where that
is natural) and a ``manifest.json`` into the output directory.  Exit codes:
0 success, 1 invariant violation during the run, 2 bad configuration or I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__, generators
from .boole import RationalPoleSum, measure_rows, vieta_check, vieta_tolerance, write_measure_csv
from .cc import (
    HypothesisResult,
    TranslatedBlockSpec,
    exceedance_sets,
    greedy_disjoint_translates,
    hypothesis_test,
    pairwise_disjoint,
    partial_sum_S,
    translated_sets,
    write_hypothesis_csv,
)
from .core_seq import BilateralSequence, IntegerWindow
from .ergodic import (
    FinitePermutationSystem,
    ObservableField,
    ergodic_complete_sum,
    transference_check,
)
from .hilbert import full_hilbert, maximal_hilbert, sufficient_window, truncated_hilbert, weak_type_report

log = logging.getLogger("hilbertlab")

OUT_ENV = "HILBERTLAB_OUT"
COMMANDS = ("transform", "maximal", "boole-check", "weak-type", "complete-conv", "hypothesis", "ergodic")
DEFAULT_TOLERANCES = {"boole": 1e-9, "dominance": 1e-12}


class ConfigError(ValueError):
    """Bad configuration; the message names the offending field."""




@dataclass
class ExperimentConfig:
    command: str
    inputs: list
    lambdas: list = field(default_factory=list)
    n: Optional[int] = None
    window: Optional[str] = None
    kind: str = "full"
    horizon: int = 10
    translates: str = "zero"
    system: Optional[dict] = None
    observable: Optional[dict] = None
    out: str = "hilbertlab-out"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.command == "ergodic":
            if not self.system:
                raise ConfigError("system: the ergodic command needs a system")
            if not self.observable:
                raise ConfigError("observable: the ergodic command needs an observable")
        elif not self.inputs:
            raise ConfigError("inputs: at least one input is required")
        for lam in self.lambdas:
            if not (isinstance(lam, (int, float)) and np.isfinite(lam) and lam > 0):
                raise ConfigError(f"lambdas: every lambda must be a positive real, got {lam!r}")
        needs_lambda = self.command in {"maximal", "boole-check", "weak-type", "complete-conv", "hypothesis", "ergodic"}
        if needs_lambda and not self.lambdas:
            raise ConfigError("lambdas: this command needs at least one lambda")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError(f"horizon: must be an integer >= 1, got {self.horizon!r}")
        if self.command == "transform":
            if self.n is None or self.n < 1:
                raise ConfigError("n: transform needs a truncation level >= 1")
            if self.window is None:
                raise ConfigError("window: transform needs --window LO..HI")
            try:
                IntegerWindow.parse(self.window)
            except ValueError as exc:
                raise ConfigError(f"window: {exc}") from None
        if self.kind not in ("full", "maximal"):
            raise ConfigError(f"kind: must be 'full' or 'maximal', got {self.kind!r}")
        parse_translate_policy(self.translates, 1)
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances or {})
        self.tolerances = tol
        return self


def parse_lambdas(spec) -> list:
    """``"0.5,1,2"``, ``"log:LO:HI:COUNT"`` or a JSON list."""
    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    if isinstance(spec, (int, float)):
        return [float(spec)]
    text = str(spec).strip()
    try:
        if text.startswith("log:"):
            lo, hi, count = text[4:].split(":")
            return np.geomspace(float(lo), float(hi), int(count)).tolist()
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"lambdas: cannot parse {spec!r}") from None


def parse_translate_policy(policy, N: int) -> TranslatedBlockSpec | str:
    """``zero``, ``linear[:c]``, ``greedy``, ``list:t1,t2,...`` or a JSON file."""
    text = str(policy)
    name, _, arg = text.partition(":")
    try:
        if name == "zero":
            return TranslatedBlockSpec.zero(N)
        if name == "linear":
            return TranslatedBlockSpec.linear(N, int(arg) if arg else 1)
        if name == "greedy":
            return "greedy"
        if name == "list":
            return TranslatedBlockSpec([int(x) for x in arg.split(",") if x.strip()])
        if Path(text).is_file():
            return TranslatedBlockSpec.load(text)
    except ValueError as exc:
        raise ConfigError(f"translates: {exc}") from None
    raise ConfigError(f"translates: unknown policy {text!r}")


def _kv(arg: str) -> dict:
    out = {}
    for part in filter(None, arg.split(",")):
        k, _, v = part.partition("=")
        out[k.strip()] = v.strip()
    return out


def parse_input(entry) -> dict:
    """Normalize ``FILE`` / ``gen:NAME:k=v,...`` strings to input dicts."""
    if isinstance(entry, dict):
        return entry
    text = str(entry)
    if text.startswith("gen:"):
        name, _, arg = text[4:].partition(":")
        return {"generator": name, **_kv(arg)}
    return {"file": text}


def load_sequence(entry: dict) -> tuple[str, BilateralSequence]:
    if "file" in entry:
        path = Path(entry["file"])
        try:
            return path.stem, BilateralSequence.load(path)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"inputs: cannot load sequence {path}: {exc}") from None
    gen = entry.get("generator")
    try:
        if gen == "delta":
            a = generators.delta(int(entry.get("at", 0)), float(entry.get("weight", 1.0)))
            return f"delta{a.support_min}", a
        if gen == "pair":
            a = generators.symmetric_pair(int(entry.get("center", 0)), int(entry.get("gap", 1)))
            return "pair", a
        if gen == "random":
            seed = int(entry["seed"])
            support = int(entry.get("support", 200))
            return f"random_s{seed}", generators.random_l1(seed, support)
    except KeyError as exc:
        raise ConfigError(f"inputs: generator {gen!r} needs {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ConfigError(f"inputs: {exc}") from None
    raise ConfigError(f"inputs: unknown input {entry!r}")


def load_pole_sum(entry: dict) -> tuple[str, RationalPoleSum]:
    if "file" in entry:
        path = Path(entry["file"])
        try:
            return path.stem, RationalPoleSum.load(path)
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"inputs: cannot load pole sum {path}: {exc}") from None
    if entry.get("generator") == "random":
        seed = int(entry.get("seed", 0))
        return f"poles_s{seed}", generators.random_pole_sum(np.random.default_rng(seed))
    raise ConfigError(f"inputs: unknown pole-sum input {entry!r}")


def load_system(entry: dict) -> FinitePermutationSystem:
    if "file" in entry:
        try:
            return FinitePermutationSystem.load(entry["file"])
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"system: {exc}") from None
    gen = entry.get("generator")
    try:
        if gen == "cyclic":
            return generators.cyclic_system(int(entry["M"]), int(entry.get("step", 1)))
        if gen == "random":
            return generators.random_system(int(entry["M"]), int(entry["seed"]))
        if gen == "identity":
            return FinitePermutationSystem.identity(int(entry["M"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"system: generator {gen!r}: {exc}") from None
    raise ConfigError(f"system: unknown system {entry!r}")


def load_observable(entry: dict, M: int) -> ObservableField:
    if "file" in entry:
        try:
            return ObservableField.load(entry["file"])
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"observable: {exc}") from None
    gen = entry.get("generator")
    try:
        if gen == "indicator":
            pts = [int(p) for p in str(entry.get("points", "0")).split(";")]
            return ObservableField.indicator(M, pts)
        if gen == "random":
            return generators.random_observable(M, int(entry["seed"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"observable: generator {gen!r}: {exc}") from None
    raise ConfigError(f"observable: unknown observable {entry!r}")


class Run:
    """Collects CSV outputs and invariant failures for one command."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.out = Path(config.out)
        self.files: list = []
        self.violations: list = []
        self.summary: dict = {}

    def write(self, name: str, writer) -> None:
        buf = io.StringIO()
        writer(buf)
        path = self.out / name
        path.write_text(buf.getvalue())
        self.files.append(name)

    def violate(self, msg: str) -> None:
        log.error("invariant violation: %s", msg)
        self.violations.append(msg)


def _cmd_transform(run: Run):
    cfg = run.config
    window = IntegerWindow.parse(cfg.window)
    for entry in cfg.inputs:
        label, a = load_sequence(entry)
        field_ = truncated_hilbert(a, cfg.n, window)
        run.write(f"transform_{label}_n{cfg.n}.csv", field_.write_csv)


def _cmd_maximal(run: Run):
    cfg = run.config
    for entry in cfg.inputs:
        label, a = load_sequence(entry)
        for lam in cfg.lambdas:
            if a.is_empty:
                continue
            window = sufficient_window(a, lam)
            mx = maximal_hilbert(a, window)
            full = full_hilbert(a, window)
            gap = np.min(mx.values - np.abs(full.values))
            if gap < -cfg.tolerances["dominance"]:
                run.violate(f"{label}: maximal < |full| by {-gap!r} at lambda={lam!r}")
            run.write(f"maximal_{label}_lam{lam!r}.csv", mx.write_csv)
            run.summary[f"{label}@{lam!r}"] = {"count": mx.count(lam)}


def _cmd_boole(run: Run):
    cfg = run.config
    tol = cfg.tolerances["boole"]
    for entry in cfg.inputs:
        label, rs = load_pole_sum(entry)
        rows = measure_rows(rs, cfg.lambdas)
        for r in rows:
            if not r["residual"] <= tol:
                run.violate(f"{label}: Boole residual {r['residual']!r} > {tol!r} at lambda={r['lambda']!r} ({r['side']})")
        for lam in cfg.lambdas:
            res = vieta_check(rs, lam)
            if res > vieta_tolerance(rs, lam):
                run.violate(f"{label}: root-sum residual {res!r} at lambda={lam!r}")
        run.write(f"boole_{label}.csv", lambda fh: write_measure_csv(rows, fh))


def _cmd_weak_type(run: Run):
    cfg = run.config
    for entry in cfg.inputs:
        label, a = load_sequence(entry)
        reports = weak_type_report(a, cfg.lambdas, cfg.kind)
        ordered = sorted(reports, key=lambda r: r.lam)
        counts = [r.count for r in ordered]
        if any(c2 > c1 for c1, c2 in zip(counts, counts[1:])):
            run.violate(f"{label}: exceedance counts increase with lambda")

        def write(fh, reports=reports):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "kind", "count", "l1_norm", "ratio"])
            for r in reports:
                w.writerow([repr(r.lam), r.kind, r.count, repr(r.l1), repr(r.ratio)])

        run.write(f"weaktype_{cfg.kind}_{label}.csv", write)
        run.summary[label] = {"max_ratio": max((r.ratio for r in reports), default=0.0)}


def _cmd_complete_conv(run: Run):
    cfg = run.config
    for entry in cfg.inputs:
        label, a = load_sequence(entry)
        for lam in cfg.lambdas:
            rep = partial_sum_S(a, lam, cfg.horizon)
            if any(c > rep.maximal_count for c in rep.per_n_counts):
                run.violate(f"{label}: #A_n exceeds the maximal level set at lambda={lam!r}")
            run.write(f"cc_{label}_lam{lam!r}.csv", rep.write_csv)
            run.summary[f"{label}@{lam!r}"] = rep.summary()


def _cmd_hypothesis(run: Run):
    cfg = run.config
    for entry in cfg.inputs:
        label, a = load_sequence(entry)
        results: list[HypothesisResult] = []
        for lam in cfg.lambdas:
            spec = parse_translate_policy(cfg.translates, cfg.horizon)
            if spec == "greedy":
                spec = greedy_disjoint_translates(a, lam, cfg.horizon)
                sets = exceedance_sets(a, lam, cfg.horizon)
                if not pairwise_disjoint(translated_sets(sets, spec)):
                    run.violate(f"{label}: greedy translates overlap at lambda={lam!r}")
            results.append(hypothesis_test(a, lam, spec))
        run.write(f"hypothesis_{label}.csv", lambda fh, r=results: write_hypothesis_csv(r, fh))


def _cmd_ergodic(run: Run):
    cfg = run.config
    sys_ = load_system(cfg.system)
    f = load_observable(cfg.observable, sys_.size)
    if f.size != sys_.size:
        raise ConfigError(f"observable: {f.size} values for a system of size {sys_.size}")
    for lam in cfg.lambdas:
        rep = ergodic_complete_sum(sys_, f, lam, cfg.horizon)
        run.write(f"ergodic_lam{lam!r}.csv", rep.write_csv)
        j_max = min(cfg.horizon, sys_.size)
        verdict = transference_check(sys_, f, lam, cfg.horizon, range(-j_max, j_max + 1))
        if not verdict.passed:
            run.violate(f"transference failed at lambda={lam!r}: (j, x) = {verdict.counterexample}")
        run.summary[f"{lam!r}"] = {"total": rep.total, "bound_value": rep.bound_value, "growth": rep.growth}


HANDLERS = {
    "transform": _cmd_transform,
    "maximal": _cmd_maximal,
    "boole-check": _cmd_boole,
    "weak-type": _cmd_weak_type,
    "complete-conv": _cmd_complete_conv,
    "hypothesis": _cmd_hypothesis,
    "ergodic": _cmd_ergodic,
}


def run(config: ExperimentConfig) -> Run:
    """Execute one validated config; raises ``ConfigError`` on bad input."""
    config.validate()
    r = Run(config)
    r.out.mkdir(parents=True, exist_ok=True)
    HANDLERS[config.command](r)
    manifest = {
        "command": config.command,
        "config": asdict(config),
        "files": r.files,
        "violations": r.violations,
        "summary": r.summary,
        "versions": {"hilbertlab": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "created": datetime.now(timezone.utc).isoformat(),
    }
    (r.out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    return r


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hilbertlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    def common(sp, seq=True):
        sp.add_argument("--config", help="JSON config; command-line flags override it")
        sp.add_argument("--out", help=f"output directory (env {OUT_ENV})")
        if seq:
            sp.add_argument("--seq", action="append", default=[],
                            help="sequence JSON file or gen:delta|pair|random:seed=S,support=K")

    sp = sub.add_parser("transform", help="truncated transform on a window")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--window")

    sp = sub.add_parser("maximal", help="maximal transform over the sufficient window")
    common(sp)
    sp.add_argument("--lambda", dest="lambdas")

    sp = sub.add_parser("boole-check", help="level-set measures of pole sums")
    common(sp, seq=False)
    sp.add_argument("--poles", action="append", default=[], help="pole-sum JSON or gen:random:seed=S")
    sp.add_argument("--lambdas")

    sp = sub.add_parser("weak-type", help="empirical weak-(1,1) ratios")
    common(sp)
    sp.add_argument("--kind", choices=["full", "maximal"])
    sp.add_argument("--lambdas")

    sp = sub.add_parser("complete-conv", help="partial sums S_N")
    common(sp)
    sp.add_argument("--lambda", dest="lambdas")
    sp.add_argument("--horizon", type=int)

    sp = sub.add_parser("hypothesis", help="translated-block maximal level sets")
    common(sp)
    sp.add_argument("--lambda", dest="lambdas")
    sp.add_argument("--translates", help="zero | linear[:c] | greedy | list:t1,t2,... | JSON file")
    sp.add_argument("--horizon", type=int)

    sp = sub.add_parser("ergodic", help="ergodic complete sums on a permutation system")
    common(sp, seq=False)
    sp.add_argument("--system", help="system JSON or gen:cyclic:M=16 | gen:random:M=64,seed=S")
    sp.add_argument("--observable", help="observable JSON or gen:indicator:points=0 | gen:random:seed=S")
    sp.add_argument("--lambda", dest="lambdas")
    sp.add_argument("--horizon", type=int)
    return p


def config_from_args(args: argparse.Namespace, environ=os.environ) -> ExperimentConfig:
    data: dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        unknown = set(data) - set(ExperimentConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
    data["command"] = args.command
    if args.command == "boole-check" and args.poles:
        data["inputs"] = args.poles
    elif getattr(args, "seq", None):
        data["inputs"] = args.seq
    for name in ("n", "window", "kind", "horizon", "translates"):
        val = getattr(args, name, None)
        if val is not None:
            data[name] = val
    if getattr(args, "lambdas", None) is not None:
        data["lambdas"] = args.lambdas
    for name in ("system", "observable"):
        if getattr(args, name, None):
            data[name] = getattr(args, name)
    if getattr(args, "out", None):
        data["out"] = args.out
    elif "out" not in data and environ.get(OUT_ENV):
        data["out"] = environ[OUT_ENV]

    data["inputs"] = [parse_input(e) for e in data.get("inputs", [])]
    data["lambdas"] = parse_lambdas(data.get("lambdas", []))
    for name in ("system", "observable"):
        if data.get(name) is not None:
            data[name] = parse_input(data[name])
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from None


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.command:
        parser.print_help()
        return 2
    try:
        result = run(config_from_args(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name in result.files:
        print(result.out / name)
    if result.violations:
        for v in result.violations:
            print(f"invariant violation: {v}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
