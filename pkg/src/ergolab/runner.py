"""Experiment runner: load a document, validate it whole, then compute and write artifacts."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from src.core.ergodic_opt import gauge_gap, gauge_series, open_set_witness
from src.core.errors import ConfigError
from src.core.experiment_config import (
    CheckpointMethod,
    ExperimentConfig,
    GaugeExperiment,
    MonteCarloExperiment,
    NormalityExperiment,
    PathologicalExperiment,
    RotationExperiment,
    StdiffExperiment,
    parse_experiments,
)
from src.core.generators import checkpoint_series, counted_checkpoint_series
from src.core.harness_config import HarnessConfig
from src.core.json_types import JsonObject, format_rational, rational_to_float
from src.core.mc_harness import CenterMode, run_fixed_center, run_random_centers, summarize
from src.core.measures import measure_to_json
from src.core.rotation import (
    birkhoff_rotation_average,
    identity_counterexample,
    rotation_series,
)
from src.core.stdiff import (
    DiffSeries,
    birkhoff_value,
    normality_report,
    pointwise_gap,
    stdiff_series,
)

from .artifacts import write_json, write_jsonl, write_series_csv

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class ExperimentOutcome:
    """What one experiment produced."""

    name: str
    kind: str
    summary: str
    outputs: list[Path] = field(default_factory=list)
    data: JsonObject = field(default_factory=dict)

    def to_dict(self) -> JsonObject:
        return {
            "name": self.name,
            "kind": self.kind,
            "summary": self.summary,
            "outputs": [str(path) for path in self.outputs],
            "data": self.data,
        }


def load_document(path: str | Path) -> object:
    """Read an experiment document; IO and JSON failures are config errors."""
    config_path = Path(path).expanduser()
    try:
        return json.loads(config_path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config: file not found: {config_path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {config_path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"config: could not read {config_path}: {exc}") from exc


def load_experiments(
    path: str | Path, harness: HarnessConfig, *, seed_override: int | None = None
) -> list[ExperimentConfig]:
    return parse_experiments(load_document(path), harness, seed_override=seed_override)


def _metadata(harness: HarnessConfig, **extra: object) -> JsonObject:
    data: JsonObject = {"harness": harness.to_dict()}
    data.update(extra)  # type: ignore[arg-type]
    return data


def _float_value(value: Fraction | float) -> float:
    return rational_to_float(value) if isinstance(value, Fraction) else float(value)


def _run_stdiff(exp: StdiffExperiment, out_dir: Path, harness: HarnessConfig) -> ExperimentOutcome:
    alphabet = exp.measure.alphabet
    x = exp.point.build(alphabet, exp.measure)
    series = stdiff_series(exp.measure, x, exp.ks, exp.function)
    outputs = [write_series_csv(out_dir / f"{exp.name}.csv", series)]
    meta = _metadata(
        harness,
        measure=measure_to_json(exp.measure),
        function=exp.function.to_dict(),
        point_provenance=x.provenance,
        ks=list(exp.ks),
    )
    if exp.compare_birkhoff:
        birkhoff = DiffSeries(
            tuple((k, birkhoff_value(x, k, exp.function)) for k in exp.ks),
            exp.function.describe(),
            f"{x.provenance}|birkhoff",
        )
        outputs.append(write_series_csv(out_dir / f"{exp.name}.birkhoff.csv", birkhoff))
        gap = pointwise_gap(exp.measure, x, exp.ks[-1], exp.function)
        meta["pointwise_gap"] = {"k": exp.ks[-1], "value": format_rational(gap)}
    outputs.append(write_json(out_dir / f"{exp.name}.meta.json", meta))
    k_last, value = series.entries[-1]
    assert isinstance(value, Fraction)
    return ExperimentOutcome(
        exp.name,
        exp.kind.value,
        f"k={k_last} value={format_rational(value)} ({rational_to_float(value):.6f})",
        outputs,
        {"series": series.to_dict()},
    )


def _run_pathological(
    exp: PathologicalExperiment, out_dir: Path, harness: HarnessConfig
) -> ExperimentOutcome:
    if exp.method is CheckpointMethod.COUNTED:
        series = counted_checkpoint_series(exp.n_max)
    else:
        series = checkpoint_series(exp.n_max)
    outputs = [
        write_series_csv(out_dir / f"{exp.name}.csv", series),
        write_json(
            out_dir / f"{exp.name}.meta.json",
            _metadata(harness, n_max=exp.n_max, method=exp.method.value),
        ),
    ]
    values = [_float_value(v) for v in series.values]
    return ExperimentOutcome(
        exp.name,
        exp.kind.value,
        f"{len(values)} checkpoints, min={min(values):.6f} max={max(values):.6f}",
        outputs,
        {"series": series.to_dict()},
    )


def _run_normality(
    exp: NormalityExperiment, out_dir: Path, harness: HarnessConfig
) -> ExperimentOutcome:
    x = exp.point.build(exp.measure.alphabet, exp.measure)
    report = normality_report(exp.measure, x, exp.max_word_len, exp.k)
    data = report.to_dict()
    payload = {**data, **_metadata(harness, measure=measure_to_json(exp.measure))}
    outputs = [write_json(out_dir / f"{exp.name}.json", payload)]
    return ExperimentOutcome(
        exp.name,
        exp.kind.value,
        f"k={exp.k} L={exp.max_word_len} max deviation "
        f"{rational_to_float(report.max_deviation):.6f}",
        outputs,
        data,
    )


def _run_gauge(exp: GaugeExperiment, out_dir: Path, harness: HarnessConfig) -> ExperimentOutcome:
    series = gauge_series(exp.sft, exp.function, exp.k_max)
    data = series.to_dict()
    data["subadditivity_violations"] = len(series.subadditivity_violations())
    summary = (
        f"mmc={format_rational(series.mmc.value)} "
        f"Gamma_{exp.k_max}={format_rational(series.value(exp.k_max))}"
    )
    if exp.measure is not None:
        gap = gauge_gap(exp.measure, exp.sft, exp.function, exp.k_max)
        data["gap"] = format_rational(gap.gap)
        data["gauge_gap"] = gap.to_dict()
        data["measure"] = measure_to_json(exp.measure)
        summary += f" gap={format_rational(gap.gap)}"
    if exp.open_set is not None and exp.measure is not None:
        witness = open_set_witness(
            exp.measure, exp.sft, exp.function, exp.open_set.k, exp.open_set.level
        )
        data["open_set"] = witness.to_dict()
    payload = {
        **data,
        **_metadata(harness, sft=exp.sft.to_dict(), function=exp.function.to_dict()),
    }
    outputs = [write_json(out_dir / f"{exp.name}.json", payload)]
    return ExperimentOutcome(exp.name, exp.kind.value, summary, outputs, data)


def _run_rotation(
    exp: RotationExperiment, out_dir: Path, harness: HarnessConfig
) -> ExperimentOutcome:
    series = rotation_series(exp.system, exp.x, exp.ks, exp.function)
    outputs = [write_series_csv(out_dir / f"{exp.name}.csv", series)]
    meta = _metadata(
        harness,
        theta=exp.system.theta,
        radius={"kind": exp.system.radius.kind.value, "r1": exp.system.radius.r1},
        function=exp.function.to_dict(),
        x=exp.x,
    )
    if exp.compare_birkhoff:
        birkhoff = DiffSeries(
            tuple(
                (k, birkhoff_rotation_average(exp.system, exp.x, k, exp.function))
                for k in exp.ks
            ),
            series.function,
            f"{series.provenance}|birkhoff",
        )
        outputs.append(write_series_csv(out_dir / f"{exp.name}.birkhoff.csv", birkhoff))
    data: JsonObject = {"series": series.to_dict()}
    if exp.identity is not None:
        rows = [identity_counterexample(exp.identity.x0, k).to_dict() for k in exp.identity.ks]
        data["identity"] = rows
        outputs.append(
            write_json(out_dir / f"{exp.name}.identity.json", {"rows": rows, **_metadata(harness)})
        )
    outputs.append(write_json(out_dir / f"{exp.name}.meta.json", meta))
    k_last, value = series.entries[-1]
    return ExperimentOutcome(
        exp.name, exp.kind.value, f"k={k_last} value={float(value):.6g}", outputs, data
    )


def _run_montecarlo(
    exp: MonteCarloExperiment, out_dir: Path, harness: HarnessConfig, threads: int
) -> ExperimentOutcome:
    if exp.spec.centers is CenterMode.PER_K:
        trials = run_random_centers(
            exp.measure, exp.spec, exp.master_seed, exp.n_trials, threads=threads
        )
    else:
        trials = run_fixed_center(
            exp.measure, exp.spec, exp.master_seed, exp.n_trials, threads=threads
        )
    summary = summarize(trials, exp.spec, exp.epsilon)
    data = summary.to_dict()
    data["word"] = list(exp.spec.word.symbols)
    outputs = [
        write_jsonl(out_dir / f"{exp.name}.trials.jsonl", (t.to_dict() for t in trials)),
        write_json(
            out_dir / f"{exp.name}.summary.json",
            {**data, **_metadata(harness, measure=measure_to_json(exp.measure))},
        ),
    ]
    return ExperimentOutcome(
        exp.name,
        exp.kind.value,
        f"{summary.n_trials} trials, pass fraction {summary.pass_fraction:.3f} "
        f"at epsilon={summary.epsilon}, mean {summary.mean_final:.6f}",
        outputs,
        data,
    )


def run_experiment(
    exp: ExperimentConfig, out_dir: Path, harness: HarnessConfig, *, threads: int = 1
) -> ExperimentOutcome:
    logger.info("Running %s experiment %r", exp.kind.value, exp.name)
    match exp:
        case StdiffExperiment():
            return _run_stdiff(exp, out_dir, harness)
        case PathologicalExperiment():
            return _run_pathological(exp, out_dir, harness)
        case NormalityExperiment():
            return _run_normality(exp, out_dir, harness)
        case GaugeExperiment():
            return _run_gauge(exp, out_dir, harness)
        case RotationExperiment():
            return _run_rotation(exp, out_dir, harness)
        case MonteCarloExperiment():
            return _run_montecarlo(exp, out_dir, harness, threads)
    raise ConfigError(f"unsupported experiment {exp!r}")


__all__ = [
    "ExperimentOutcome",
    "load_document",
    "load_experiments",
    "run_experiment",
]
