"""Benchmark harness: run (problem, mode, quota) cells and record the results.

A suite file is JSON::

    {
      "name": "logistics",
      "problems": [
        {"domain": "fixtures:logistics.hddl-lite",
         "problem": "fixtures:logistics_p1.hddl-lite"}
      ],
      "modes": ["baseline", "enhanced"],
      "quotas": [100, 200, 300, 400],     # null entry = find every plan
      "timeout": 60,                       # seconds per cell
      "repeat": 1,                         # keep the fastest of n runs
      "workers": 1,
      "suppress_duplicates": null,         # null = mode default
      "output": "logistics-results.json"
    }

``fixtures:`` paths resolve inside the package; other relative paths resolve
against the suite file. Setting ``HTNPLANNER_MEMORY_MB`` caps the address
space of each cell (cells then run in worker processes); a cell that runs out
of memory is recorded as ``dnf``.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

from .. import fixtures
from ..parser import parse_domain, parse_problem
from ..planner import PlannerOptions, SearchStats, SearchTimeout, plan
from .validate import validate_plan

log = logging.getLogger(__name__)

MEMORY_ENV = "HTNPLANNER_MEMORY_MB"


@dataclass
class CellSpec:
    domain: str
    problem: str
    mode: str
    quota: Optional[int]
    timeout: Optional[float] = None
    repeat: int = 1
    suppress_duplicates: Optional[bool] = None


@dataclass
class BenchResult:
    problem_name: str
    mode: str
    plans_requested: Optional[int]
    plans_found: int
    stats: dict
    status: str = "completed"  # completed | timeout | dnf
    all_valid: bool = True
    invalid_plans: int = 0
    distinct_plans: int = 0


@dataclass
class SuiteConfig:
    name: str = "suite"
    cells: List[CellSpec] = field(default_factory=list)
    workers: int = 1
    output: Optional[Path] = None


def resolve(path: str, base: Optional[Path] = None) -> Path:
    if path.startswith("fixtures:"):
        return fixtures.path(path[len("fixtures:"):])
    p = Path(path)
    if not p.is_absolute() and base is not None:
        p = base / p
    return p


def load_suite(path) -> SuiteConfig:
    path = Path(path)
    raw = json.loads(path.read_text())
    base = path.parent
    cells = []
    quotas = raw.get("quotas", [None])
    for entry in raw.get("problems", []):
        for mode in raw.get("modes", ["baseline", "enhanced"]):
            for quota in quotas:
                cells.append(CellSpec(
                    domain=str(resolve(entry["domain"], base)),
                    problem=str(resolve(entry["problem"], base)),
                    mode=mode,
                    quota=quota,
                    timeout=raw.get("timeout"),
                    repeat=raw.get("repeat", 1),
                    suppress_duplicates=raw.get("suppress_duplicates"),
                ))
    out = raw.get("output")
    return SuiteConfig(name=raw.get("name", path.stem), cells=cells,
                       workers=raw.get("workers", 1),
                       output=resolve(out, base) if out else None)


def run_cell(cell: CellSpec) -> BenchResult:
    domain = parse_domain(Path(cell.domain).read_text())
    problem = parse_problem(Path(cell.problem).read_text())
    best = None
    for _ in range(max(1, cell.repeat)):
        result = _run_once(cell, domain, problem)
        if best is None or result.stats["wall_time"] < best.stats["wall_time"]:
            best = result
        if result.status != "completed":
            break
    return best


def _run_once(cell, domain, problem) -> BenchResult:
    options = PlannerOptions(mode=cell.mode, max_plans=cell.quota, time_limit=cell.timeout,
                             suppress_duplicates=cell.suppress_duplicates)
    search = plan(problem, domain, options)
    found = invalid = 0
    distinct = set()
    status = "completed"
    try:
        for p in search:
            found += 1
            distinct.add(p.steps)
            if not validate_plan(domain, problem, p).valid:
                invalid += 1
    except SearchTimeout:
        status = "timeout"
    except MemoryError:
        status = "dnf"
    return BenchResult(problem.name, str(options.mode.value), cell.quota, found,
                       asdict(search.stats), status, invalid == 0, invalid, len(distinct))


def _limit_memory():
    mb = os.environ.get(MEMORY_ENV)
    if not mb:
        return
    import resource
    limit = int(float(mb) * 1024 * 1024)
    resource.setrlimit(resource.RLIMIT_AS, (limit, limit))


def _dnf(cell: CellSpec, reason: str) -> BenchResult:
    log.warning("cell %s/%s failed: %s", cell.problem, cell.mode, reason)
    return BenchResult(Path(cell.problem).stem, cell.mode, cell.quota, 0,
                       asdict(SearchStats()), "dnf", True, 0, 0)


def run_benchmark(config: SuiteConfig) -> List[BenchResult]:
    """Run every cell of ``config``; results come back in cell order."""
    if not config.cells:
        results: List[BenchResult] = []
    elif config.workers > 1 or os.environ.get(MEMORY_ENV):
        results = []
        with ProcessPoolExecutor(max_workers=max(1, config.workers),
                                 initializer=_limit_memory) as pool:
            futures = [pool.submit(run_cell, c) for c in config.cells]
            for cell, fut in zip(config.cells, futures):
                try:
                    results.append(fut.result())
                except Exception as exc:  # worker killed, e.g. by the memory cap
                    results.append(_dnf(cell, repr(exc)))
    else:
        results = [run_cell(c) for c in config.cells]
    if config.output is not None:
        write_results(results, config.output)
    return results


def write_results(results: List[BenchResult], path) -> None:
    Path(path).write_text(json.dumps([asdict(r) for r in results], indent=2) + "\n")
