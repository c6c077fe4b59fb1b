"""
Verification suite service.

Owns the worker pool used to run random trials. Trials are independent and
seeded per index, so the report does not depend on the thread count.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterator, Optional

from src.plgroup.core.certify import iter_lemma_suite, run_lemma_suite
from src.plgroup.models.report import CheckResult, SuiteReport
from src.plgroup.services.base import BaseService
from src.plgroup.utils.config import config_manager


class SuiteService(BaseService):
    """Service running the verification suite on a thread pool."""

    def __init__(self, config: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(config)
        self.executor: Optional[ThreadPoolExecutor] = None
        self.threads = 1

    def _resolve_threads(self) -> int:
        if "threads" in self.config:
            return max(1, int(self.config["threads"]))
        threads = config_manager.get("threads")
        if threads is None:
            threads = config_manager.section("suite").get("threads", 1)
        return max(1, int(threads or 1))

    def initialize(self) -> None:
        if self.initialized:
            self.logger.debug("Suite service already initialized")
            return

        self.threads = self._resolve_threads()
        self.logger.info("Initializing suite service with %d worker(s)", self.threads)
        self.executor = ThreadPoolExecutor(
            max_workers=self.threads, thread_name_prefix="plgroup-suite"
        )
        self.initialized = True

    def shutdown(self) -> None:
        self.logger.info("Shutting down suite service")
        if self.executor is not None:
            self.executor.shutdown(wait=True)
        self.executor = None
        self.initialized = False

    def _require_executor(self) -> ThreadPoolExecutor:
        if not self.initialized or self.executor is None:
            raise RuntimeError("Suite service not initialized")
        return self.executor

    def run(self, n: int, seed: int, iterations: int, **settings: int) -> SuiteReport:
        """
        Run the full suite.

        Args:
            n: Level
            seed: Suite seed
            iterations: Trials per random check
            **settings: ``max_word_length`` or ``heavy_divisor`` overrides

        Raises:
            RuntimeError: If the service is not initialized
        """
        executor = self._require_executor()
        return run_lemma_suite(n, seed, iterations, map_fn=executor.map, **settings)

    def stream(self, n: int, seed: int, iterations: int, **settings: int) -> Iterator[CheckResult]:
        """Yield check results as each one finishes."""
        executor = self._require_executor()
        yield from iter_lemma_suite(n, seed, iterations, map_fn=executor.map, **settings)
