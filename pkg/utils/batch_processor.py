"""
Batch Processing Module
Runs batches of independent pure tasks (pairwise disc relations,
certificate sub-checks) on a thread pool and returns their results in
submission order, so reports built from them are deterministic.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

import config

logger = logging.getLogger(__name__)


@dataclass
class BatchRequest:
    """
    A single task in a batch.

    Attributes:
        id: Task identifier, used in logs and results
        data: Keyword arguments for the processor function
    """
    id: str
    data: Dict[str, Any]


@dataclass
class BatchResult:
    id: str
    success: bool
    data: Any = None
    error: Optional[BaseException] = None


class BatchProcessor:
    """
    Processes queued tasks in batches on a ThreadPoolExecutor.
    Use as a context manager so the executor is shut down.
    """

    def __init__(self, batch_size: int = 64, max_workers: int = None):
        """
        Initialize BatchProcessor.

        Args:
            batch_size: Maximum number of tasks submitted at once
            max_workers: Worker threads (config.MAX_WORKERS by default)
        """
        self.batch_size = batch_size
        self.max_workers = max_workers or config.MAX_WORKERS
        self.pending_requests: List[BatchRequest] = []
        self.executor = ThreadPoolExecutor(max_workers=self.max_workers)

    def __enter__(self) -> 'BatchProcessor':
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.shutdown()

    def add_request(self, request_id: str, data: Dict[str, Any]) -> None:
        self.pending_requests.append(BatchRequest(id=request_id, data=data))

    def process_batch(self, processor_func: Callable[..., Any]) -> List[BatchResult]:
        """
        Run every pending task through processor_func(**data).

        Returns:
            Results in submission order; a raising task yields success=False
            with the exception kept in `error`
        """
        if not self.pending_requests:
            return []
        results: List[BatchResult] = []
        batches = [
            self.pending_requests[i:i + self.batch_size]
            for i in range(0, len(self.pending_requests), self.batch_size)
        ]
        for batch in batches:
            results.extend(self._process_single_batch(batch, processor_func))
        self.pending_requests.clear()
        failed = sum(1 for r in results if not r.success)
        if failed:
            logger.debug(f"[BATCH] {failed}/{len(results)} tasks raised")
        return results

    def _process_single_batch(
        self,
        batch: List[BatchRequest],
        processor_func: Callable[..., Any]
    ) -> List[BatchResult]:
        futures = [(request, self.executor.submit(processor_func, **request.data)) for request in batch]
        results: List[BatchResult] = []
        for request, future in futures:
            try:
                results.append(BatchResult(request.id, True, future.result()))
            except Exception as e:
                results.append(BatchResult(request.id, False, error=e))
        return results

    def map(self, processor_func: Callable[..., Any], items: List[Dict[str, Any]]) -> List[Any]:
        """
        Run processor_func(**item) for every item and return the values in
        order, re-raising the first failure.
        """
        for i, item in enumerate(items):
            self.add_request(str(i), item)
        values = []
        for result in self.process_batch(processor_func):
            if not result.success:
                raise result.error
            values.append(result.data)
        return values

    def get_pending_count(self) -> int:
        return len(self.pending_requests)

    def shutdown(self) -> None:
        self.executor.shutdown(wait=True)
