"""
Check runner - resolves a selection against the suites and runs it
"""

from __future__ import annotations

import asyncio
import fnmatch
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

from asgiref.sync import sync_to_async

from . import __version__
from .catalog import (
    GROUPS,
    AlgebraSuite,
    CheckDescriptor,
    CheckSuite,
    IdentitySuite,
    MatrixSuite,
    RealizationSuite,
    RunOptions,
)
from .exceptions import UnknownCheckError
from .tensors import CONVENTIONS


logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
ERROR = "error"
STATUSES = (PASS, FAIL, ERROR)

JACOBI_GROUP = "jacobi"


@dataclass(frozen=True)
class CheckResult:
    id: str
    paper_ref: str
    status: str
    residual_terms: int = 0
    residual_text: str = ""
    duration_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def as_dict(self, durations: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "id": self.id,
            "paper_ref": self.paper_ref,
            "status": self.status,
            "residual_terms": self.residual_terms,
        }
        if self.residual_text:
            data["residual_text"] = self.residual_text
        if durations:
            data["duration_ms"] = round(self.duration_ms, 3)
        return data


@dataclass
class Report:
    checks: List[CheckResult]
    version: str = __version__
    conventions: Dict[str, Any] = field(default_factory=lambda: dict(CONVENTIONS))
    generated_at: Optional[str] = None

    @property
    def totals(self) -> Dict[str, int]:
        totals = {status: 0 for status in STATUSES}
        for result in self.checks:
            totals[result.status] += 1
        return totals

    @property
    def exit_code(self) -> int:
        return 0 if all(result.ok for result in self.checks) else 1

    def failures(self) -> List[CheckResult]:
        return [result for result in self.checks if not result.ok]

    def as_dict(self, timestamp: bool = True) -> Dict[str, Any]:
        """Without the timestamp the dictionary is a pure function of the inputs and seed."""
        data: Dict[str, Any] = {"version": self.version, "conventions": dict(self.conventions)}
        if timestamp and self.generated_at:
            data["generated_at"] = self.generated_at
        data["checks"] = [result.as_dict(durations=timestamp) for result in self.checks]
        data["totals"] = self.totals
        return data


class CheckRunner:
    """
    Owns the check suites and routes every selected check to the suite that
    defines it.
    """

    def __init__(self, options: Optional[RunOptions] = None) -> None:
        self.options = options or RunOptions()

        # Initialize check suites
        self.suites: Dict[str, CheckSuite] = {}
        self._initialize_suites()

    def _initialize_suites(self) -> None:
        self.suites["algebra"] = AlgebraSuite(self.options)
        self.suites["identities"] = IdentitySuite(self.options)
        self.suites["matrix"] = MatrixSuite(self.options)
        self.suites["realization"] = RealizationSuite(self.options)

        self._owners: Dict[str, str] = {}
        self._descriptors: Dict[str, CheckDescriptor] = {}
        logger.info("Check suites initialized:")
        for suite_name, suite in self.suites.items():
            checks = suite.get_checks()
            for descriptor in checks:
                if descriptor.id in self._owners:
                    raise ValueError(f"duplicate check identifier {descriptor.id}")
                self._owners[descriptor.id] = suite_name
                self._descriptors[descriptor.id] = descriptor
            logger.info(f" * {suite_name}: {len(checks)} checks")

    def get_all_checks(self) -> List[CheckDescriptor]:
        return [self._descriptors[check_id] for check_id in sorted(self._descriptors)]

    def resolve(self, selection: Iterable[str]) -> List[CheckDescriptor]:
        """Expand groups, identifiers and glob patterns into sorted descriptors."""
        selection = list(selection) or ["all"]
        chosen: Dict[str, CheckDescriptor] = {}
        unknown = []
        for item in selection:
            matched = self._match(item)
            if not matched:
                unknown.append(item)
            for descriptor in matched:
                chosen[descriptor.id] = descriptor
        if unknown:
            raise UnknownCheckError(unknown)
        return [chosen[check_id] for check_id in sorted(chosen)]

    def _match(self, item: str) -> List[CheckDescriptor]:
        if item == "all":
            return list(self._descriptors.values())
        if item in GROUPS:
            return self.suites[item].get_checks()
        if item == JACOBI_GROUP:
            return [
                d for check_id, d in self._descriptors.items()
                if check_id.startswith("eq3.jacobi.") and check_id != "eq3.jacobi.degenerate"
            ]
        if item in self._descriptors:
            return [self._descriptors[item]]
        if any(ch in item for ch in "*?["):
            return [d for check_id, d in self._descriptors.items() if fnmatch.fnmatchcase(check_id, item)]
        return []

    def _run_blocking(self, descriptor: CheckDescriptor) -> CheckResult:
        suite = self.suites[self._owners[descriptor.id]]
        logger.debug(f"Running {descriptor.id}")
        started = time.perf_counter()
        try:
            verdict = suite.run_check(descriptor.id)
        except Exception as e:
            elapsed = (time.perf_counter() - started) * 1000.0
            logger.warning(f"Check {descriptor.id} raised {type(e).__name__}: {e}")
            return CheckResult(descriptor.id, descriptor.paper_ref, ERROR, 1, f"{type(e).__name__}: {e}", elapsed)
        elapsed = (time.perf_counter() - started) * 1000.0
        if verdict.passed:
            logger.debug(f"Finished {descriptor.id} in {elapsed:.1f} ms")
            return CheckResult(descriptor.id, descriptor.paper_ref, PASS, 0, "", elapsed)
        logger.warning(f"Check {descriptor.id} failed with {verdict.residual_terms} residual terms")
        return CheckResult(
            descriptor.id, descriptor.paper_ref, FAIL, verdict.residual_terms, verdict.residual_text, elapsed
        )

    async def handle_check(self, descriptor: CheckDescriptor) -> CheckResult:
        """Route a check to its suite on a worker thread."""
        return await sync_to_async(self._run_blocking, thread_sensitive=False)(descriptor)

    async def _run_in_order(self, descriptors: List[CheckDescriptor]) -> List[CheckResult]:
        return [await self.handle_check(d) for d in descriptors]

    async def _run_in_processes(self, descriptors: List[CheckDescriptor], jobs: int) -> List[CheckResult]:
        # the symbolic work holds the GIL, so parallel runs need separate processes
        loop = asyncio.get_running_loop()
        logger.info(f"Running {len(descriptors)} checks on {jobs} worker processes")
        with ProcessPoolExecutor(max_workers=jobs, initializer=_start_worker, initargs=(self.options,)) as pool:
            futures = [loop.run_in_executor(pool, _run_in_worker, d.id) for d in descriptors]
            return await asyncio.gather(*futures)

    async def run(self, selection: Iterable[str] = ("all",), jobs: int = 1) -> Report:
        descriptors = self.resolve(selection)
        if jobs > 1 and len(descriptors) > 1:
            results = await self._run_in_processes(descriptors, min(jobs, len(descriptors)))
        else:
            results = await self._run_in_order(descriptors)
        report = Report(
            sorted(results, key=lambda r: r.id),
            generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        totals = report.totals
        logger.info(f"Run finished: {totals[PASS]} pass, {totals[FAIL]} fail, {totals[ERROR]} error")
        return report

    def run_sync(self, selection: Iterable[str] = ("all",), jobs: int = 1) -> Report:
        return asyncio.run(self.run(selection, jobs))


_WORKER: Optional[CheckRunner] = None


def _start_worker(options: RunOptions) -> None:
    global _WORKER
    _WORKER = CheckRunner(options)


def _run_in_worker(check_id: str) -> CheckResult:
    return _WORKER._run_blocking(_WORKER._descriptors[check_id])


def run(selection: Iterable[str] = ("all",), options: Optional[RunOptions] = None, jobs: int = 1) -> Report:
    return CheckRunner(options).run_sync(selection, jobs)


def list_checks(options: Optional[RunOptions] = None) -> List[CheckDescriptor]:
    return CheckRunner(options).get_all_checks()
