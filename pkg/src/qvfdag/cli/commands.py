"""Subcommand implementations. Each returns a process exit code."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import pandas as pd
import structlog

from qvfdag.cli.bench import BenchTask, run_replication, summarize_metrics, summarize_timing
from qvfdag.cli.run_config import RunConfig
from qvfdag.common.config import Settings
from qvfdag.common.errors import EdgeListError
from qvfdag.common.io import (
    check_output_dir,
    dump_json,
    read_data_csv,
    read_dag,
    read_edge_list,
    read_json,
    staged_outputs,
    write_data_csv,
    write_edge_list,
    write_json,
)
from qvfdag.common.logging import PhaseTimer, get_run_id
from qvfdag.common.utils import parallel_map, resolve_n_jobs
from qvfdag.evaluation import structural_metrics
from qvfdag.families import QvfFamily, parse_families
from qvfdag.graph import layers_of
from qvfdag.learning import LayerLearnConfig, learn_structure
from qvfdag.simulation import ComponentRanges, ParamRange, SimSpec, simulate

logger = structlog.get_logger()


def _seed(args: argparse.Namespace, settings: Settings) -> int:
    return int(args.seed) if args.seed is not None else settings.seed


def _threads(args: argparse.Namespace, settings: Settings) -> int:
    return resolve_n_jobs(args.threads if args.threads is not None else settings.threads)


def _learn_config(args: argparse.Namespace, settings: Settings, seed: int, n_jobs: int, **extra: object) -> LayerLearnConfig:
    overrides: dict[str, object] = {"seed": seed, "n_jobs": n_jobs, **extra}
    if args.epsilon is not None:
        overrides["epsilon_mode"] = "fixed"
        overrides["epsilon"] = tuple(args.epsilon)
    if args.splits is not None:
        overrides["stability_splits"] = args.splits
    if args.c is not None:
        overrides["stability_c"] = args.c
    return LayerLearnConfig.from_settings(settings, **overrides)


def _family_from_flags(name: str, trials: int | None) -> QvfFamily:
    match name:
        case "poisson":
            return QvfFamily.poisson()
        case "binomial":
            return QvfFamily.binomial(trials)
        case _:
            return QvfFamily.exponential()


# ── simulate ────────────────────────────────────────────────────────────


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    seed = _seed(args, settings)
    check_output_dir(args.out)
    if args.preset:
        spec = SimSpec.from_preset(args.preset, p=args.p, n=args.n, seed=seed)
    else:
        dag = read_dag(args.edges, args.p)
        p = dag.p
        spec = SimSpec(
            graph_kind="custom",
            p=p,
            n=args.n,
            family=_family_from_flags(args.family, args.trials),
            ranges=(
                ComponentRanges(
                    intercept=ParamRange(low=args.intercept_range[0], high=args.intercept_range[1]),
                    weight=ParamRange(low=args.weight_range[0], high=args.weight_range[1]),
                ),
            ),
            edges=tuple(dag.sorted_edges()),
            seed=seed,
        )
    run = RunConfig(command="simulate", seed=seed, threads=1, output=str(args.out), preset=args.preset, sim=spec)
    result = simulate(spec)
    with staged_outputs(args.out) as stage:
        write_data_csv(stage.path("data.csv"), result.data)
        write_edge_list(stage.path("truth_edges.csv"), result.dag)
        write_json(
            stage.path("meta.json"),
            {"config": run.manifest(), **result.metadata(), "truth_layers": layers_of(result.dag).to_json()},
        )
    logger.info("simulation_written", out=str(args.out), p=spec.p, n=spec.n, edges=len(result.dag.edges))
    return 0


# ── learn ───────────────────────────────────────────────────────────────


def cmd_learn(args: argparse.Namespace, settings: Settings) -> int:
    seed = _seed(args, settings)
    n_jobs = _threads(args, settings)
    record_timing = settings.record_timing and not args.no_timing
    check_output_dir(args.out)
    data, names = read_data_csv(args.data)
    p = data.shape[1]
    if args.families:
        families = parse_families(read_json(args.families), p)
    else:
        families = [QvfFamily.poisson()] * p
    config = _learn_config(args, settings, seed, n_jobs, families=tuple(families))
    run = RunConfig(
        command="learn",
        seed=seed,
        threads=n_jobs,
        output=str(args.out),
        data_path=str(args.data),
        families_path=None if args.families is None else str(args.families),
        learn=config,
        record_timing=record_timing,
    )

    result = learn_structure(data, config, timer=PhaseTimer())
    manifest = run.manifest()
    with staged_outputs(args.out) as stage:
        write_json(
            stage.path("layers.json"),
            {"config": manifest, "columns": names, "layers": result.layer_result.layers.to_json()},
        )
        write_edge_list(stage.path("edges.csv"), result.dag)
        write_json(stage.path("coefficients.json"), {"config": manifest, **result.edge_result.coefficients_json()})
        write_json(
            stage.path("diagnostics.json"),
            {"config": manifest, "seed": seed, **result.diagnostics(include_timing=record_timing)},
        )
        if args.emit_ratios:
            write_json(stage.path("ratios.json"), {"seed": seed, "steps": result.layer_result.ratio_table.to_json()})
    return 0


# ── eval ────────────────────────────────────────────────────────────────


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    estimated_edges = read_edge_list(args.estimated)
    truth_edges = read_edge_list(args.truth)
    inferred = max((max(k, j) + 1 for k, j in [*estimated_edges, *truth_edges]), default=1)
    p = args.p if args.p is not None else inferred
    if p < inferred:
        raise EdgeListError(f"--p {p} is smaller than the largest node id {inferred}")
    normalization = args.hm_normalization or settings.hm_normalization
    metrics = structural_metrics(
        read_dag(args.estimated, p), read_dag(args.truth, p), normalization=normalization
    )
    run = RunConfig(
        command="eval",
        seed=_seed(args, settings),
        threads=1,
        estimated_path=str(args.estimated),
        truth_path=str(args.truth),
        hm_normalization=normalization,
    )
    payload = {"config": run.manifest(), "p": p, "metrics": metrics.to_json()}
    if args.out:
        out = Path(args.out)
        with staged_outputs(out.parent) as stage:
            write_json(stage.path(out.name), payload)
    sys.stdout.write(dump_json(payload))
    return 0


# ── bench ───────────────────────────────────────────────────────────────


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    seed = _seed(args, settings)
    n_jobs = _threads(args, settings)
    record_timing = (settings.record_timing and not args.no_timing) or args.time_only
    check_output_dir(args.out)
    # Validate every cell before any replication starts.
    for p in args.p:
        for n in args.n:
            SimSpec.from_preset(args.preset, p=p, n=n, seed=seed)
    learn = _learn_config(args, settings, seed, 1)
    normalization = args.hm_normalization or settings.hm_normalization
    run = RunConfig(
        command="bench",
        seed=seed,
        threads=n_jobs,
        output=str(args.out),
        preset=args.preset,
        sizes=tuple(args.p),
        samples=tuple(args.n),
        reps=args.reps,
        learn=learn,
        hm_normalization=normalization,
        record_timing=record_timing,
    )
    tasks = [
        BenchTask(
            preset=args.preset,
            p=p,
            n=n,
            rep=rep,
            seed=seed + rep,
            learn=learn,
            hm_normalization=normalization,
            log_level=args.log_level or settings.log_level,
            log_format=settings.log_format,
            run_id=get_run_id(),
        )
        for p in args.p
        for n in args.n
        for rep in range(args.reps)
    ]
    logger.info("bench_started", preset=args.preset, cells=len(args.p) * len(args.n), reps=args.reps)
    results = parallel_map(run_replication, tasks, n_jobs=n_jobs, prefer="processes")
    runs = pd.DataFrame([row for rows in results for row in rows])
    failed = int((runs["status"] != "ok").sum() // 2)
    if failed:
        logger.warning("bench_failures", failed_replications=failed)

    with staged_outputs(args.out) as stage:
        if not args.time_only:
            raw = runs if record_timing else runs.drop(columns=["seconds_total", "seconds_layers", "seconds_edges"])
            raw.to_csv(stage.path("bench_runs.csv"), index=False, lineterminator="\n")
            summarize_metrics(runs).to_csv(stage.path("bench_metrics.csv"), index=False, lineterminator="\n")
        if record_timing:
            summarize_timing(runs).to_csv(stage.path("bench_timing.csv"), index=False, lineterminator="\n")
        write_json(stage.path("bench_meta.json"), {"config": run.manifest(), "failed_replications": failed})
    return 0
