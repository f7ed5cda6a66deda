"""
bench.py - Solve a directory of instances and tabulate the results.

Instances are discovered recursively; each is solved in its own worker with
its own engine state. A failing instance becomes an error row and the run
continues.
"""

import csv
import io
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Set, Union

from pydantic import BaseModel

from app.core.errors import CompositionError
from app.core.schema import load_instance
from app.pipeline import SolveOptions, solve_instance

logger = logging.getLogger(__name__)

GROUND_TRUTH_FILE = "groundtruth.json"


class InstanceTraverser:
    """Recursively collects instance files under a root directory."""

    EXCLUDED_DIRS: Set[str] = {
        '__pycache__',
        '.git',
        'node_modules',
        '.pytest_cache',
        '.venv',
        'venv',
    }

    INCLUDED_EXTENSIONS: Set[str] = {'.json'}

    def __init__(self, root_path: Union[str, Path]):
        self.root_path = Path(root_path).resolve()

        if not self.root_path.exists():
            raise ValueError(f"Path does not exist: {root_path}")

        if not self.root_path.is_dir():
            raise ValueError(f"Path is not a directory: {root_path}")

    def _should_exclude_dir(self, dir_name: str) -> bool:
        return dir_name in self.EXCLUDED_DIRS or dir_name.startswith('.')

    def _is_instance_file(self, file_path: Path) -> bool:
        if file_path.suffix not in self.INCLUDED_EXTENSIONS:
            return False
        if file_path.name.startswith('.'):
            return False
        # manifests and composition files sit next to instances
        if file_path.name == GROUND_TRUTH_FILE or file_path.name.endswith("composition.json"):
            return False
        return os.access(file_path, os.R_OK)

    def traverse(self) -> List[str]:
        """
        Returns:
            Sorted paths relative to the root, with forward slashes
        """
        found = []
        for root, dirs, files in os.walk(self.root_path):
            root_path = Path(root)
            dirs[:] = [d for d in dirs if not self._should_exclude_dir(d)]
            for file_name in files:
                file_path = root_path / file_name
                if self._is_instance_file(file_path):
                    found.append(str(file_path.relative_to(self.root_path)).replace('\\', '/'))
        found.sort()
        return found


class RunReport(BaseModel):
    instance: str
    model: Optional[str] = None
    solved: bool = False
    valid: bool = False
    length: Optional[int] = None
    execution_path: Optional[int] = None
    solve_ms: Optional[float] = None
    error: Optional[str] = None

    def to_row(self) -> Dict:
        return self.model_dump()


def run_instance(path: Union[str, Path], opts: Optional[SolveOptions] = None,
                 label: Optional[str] = None) -> RunReport:
    label = label or str(path)
    try:
        instance = load_instance(path)
        outcome = solve_instance(instance, opts)
    except (CompositionError, ValueError) as exc:
        logger.warning(f"Bench instance {label} failed: {exc}")
        return RunReport(instance=label, error=str(exc))
    return RunReport(
        instance=label,
        model=outcome.model,
        solved=outcome.solved,
        valid=outcome.valid,
        length=outcome.length if outcome.solved else None,
        execution_path=outcome.execution_path,
        solve_ms=round(outcome.solve_ms, 3),
    )


def bench_directory(root: Union[str, Path], opts: Optional[SolveOptions] = None,
                    workers: int = 1) -> List[RunReport]:
    files = InstanceTraverser(root).traverse()
    base = Path(root)
    if not files:
        return []
    logger.info(f"Benchmarking {len(files)} instances with {workers} workers")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda rel: run_instance(base / rel, opts, rel), files))


def format_reports(reports: List[RunReport], fmt: str = "json") -> str:
    rows = [r.to_row() for r in reports]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(RunReport.model_fields), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buffer.getvalue()
    return json.dumps(rows, indent=2) + "\n"


def write_reports(reports: List[RunReport], path: Union[str, Path], fmt: str = "json") -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_reports(reports, fmt))
