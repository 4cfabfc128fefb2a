from __future__ import annotations

import logging
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from src.runner.experiment import resolve_config, run_experiment
from src.runner.experiment_config import ConfigError, ExperimentConfig
from src.utils.tools import Tools

SUMMARY_FILE = 'batch_summary.json'


@dataclass(frozen=True)
class SeedResult:
    seed: int
    verdict: Optional[str] = None
    falsified: bool = False
    elapsed: Optional[float] = None
    tree_size: Optional[int] = None
    report: Optional[dict] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {'seed': self.seed, 'verdict': self.verdict, 'falsified': self.falsified, 'elapsed': self.elapsed,
                'tree_size': self.tree_size, 'error': self.error, 'report': self.report}


@dataclass
class BatchSummary:
    name: str
    results: list[SeedResult] = field(default_factory=list)

    def completed(self) -> list[SeedResult]:
        return [r for r in self.results if r.error is None]

    def failed(self) -> list[SeedResult]:
        return [r for r in self.results if r.error is not None]

    def falsification_rate(self) -> float:
        completed = self.completed()
        if not completed:
            return 0.0
        return sum(1 for r in completed if r.falsified) / len(completed)

    def timing(self) -> dict:
        return Tools.percentiles(r.elapsed for r in self.completed())

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'seeds': [r.seed for r in self.results],
            'completed': len(self.completed()),
            'failed': len(self.failed()),
            'falsification_rate': self.falsification_rate(),
            'timing_seconds': self.timing(),
            'results': [r.to_dict() for r in self.results],
        }


def run_seed(config_data: dict, seed: int, logger: Optional[logging.Logger] = None) -> SeedResult:
    """One isolated exploration; any failure is returned as the result's error."""
    logger = logger or logging.getLogger(__name__)
    try:
        config = ExperimentConfig.from_dict(config_data).with_seed(seed)
        report = run_experiment(config, logger)
    except Exception as e:
        logger.error(f"Seed {seed} failed: {e}")
        logger.error(traceback.format_exc())
        return SeedResult(seed, error=f"{type(e).__name__}: {e}")
    return SeedResult(seed, report.verdict.kind.value, report.falsified(), report.elapsed, report.tree_size,
                      report.to_dict())


def batch(config: ExperimentConfig, seeds: Sequence[int], workers: int = 1,
          logger: Optional[logging.Logger] = None) -> BatchSummary:
    """
    Run independent explorations, one per seed, and write `batch_summary.json` next to the per-seed files.

    The initial state is resolved once, so every seed starts from the same x0.

    Raises:
        ConfigError: on an empty seed list, repeated seeds or workers < 1.
    """
    logger = logger or logging.getLogger(__name__)
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ConfigError('seeds', "at least one seed is required")
    if len(set(seeds)) != len(seeds):
        raise ConfigError('seeds', f"repeated seeds in {seeds}")
    if workers < 1:
        raise ConfigError('workers', f"expected at least 1 worker, got {workers}")
    config_data = resolve_config(config, logger).to_dict()
    logger.info(f"Batch {config.name}: {len(seeds)} seeds on {workers} worker(s)")
    if workers == 1:
        results = []
        for seed in seeds:
            results.append(run_seed(config_data, seed, logger))
            logger.info(f"Seed {seed}: {results[-1].verdict or results[-1].error}")
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_seed, [config_data] * len(seeds), seeds))
    summary = BatchSummary(config.name, results)
    out = Tools.ensure_directory(config.output.directory)
    Tools.write_json(os.path.join(out, SUMMARY_FILE), summary.to_dict())
    logger.info(f"Batch {config.name}: falsification rate {summary.falsification_rate():.2f}, "
                f"{len(summary.failed())} failed seed(s)")
    return summary
