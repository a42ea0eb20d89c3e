import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, TypeVar

from src.exceptions import LadError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _run_with_timing(task: Callable[[], T]) -> Tuple[T, int]:
    """Wrapper to run a single task and time its execution."""
    start_time = time.perf_counter()
    result = task()
    latency_ms = int((time.perf_counter() - start_time) * 1000)
    return result, latency_ms


def evaluate_indexed(
    tasks: Mapping[int, Callable[[], T]],
    workers: int = 1,
    context: Optional[Dict[str, Any]] = None,
) -> Dict[int, T]:
    """
    Runs independent per-n tasks in a thread pool and returns their results in n order.
    When several tasks fail, the failure with the lowest n is re-raised with that n
    recorded in its context.
    """
    context = dict(context or {})
    results: Dict[int, T] = {}
    failures: Dict[int, LadError] = {}
    if not tasks:
        return results

    with ThreadPoolExecutor(max_workers=max(1, min(len(tasks), workers))) as executor:
        future_to_n = {executor.submit(_run_with_timing, task): n for n, task in tasks.items()}

        for future in as_completed(future_to_n):
            n = future_to_n[future]
            try:
                value, latency = future.result()
            except LadError as exc:
                logger.error(
                    "Task for n=%d failed: %s",
                    n,
                    exc,
                    extra={**context, "n": n, "status": "error", "error_code": type(exc).__name__},
                )
                failures[n] = exc
                continue
            results[n] = value
            logger.info(
                "Task for n=%d finished",
                n,
                extra={**context, "n": n, "latency": latency, "status": "ok"},
            )

    if failures:
        n = min(failures)
        raise failures[n].with_context(n=n) from failures[n]
    return {n: results[n] for n in sorted(results)}
