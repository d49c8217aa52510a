import logging
from concurrent.futures import ThreadPoolExecutor

from celery import group, shared_task
from django.conf import settings

from apps.qmacro.BLL.Core.estimation import ExperimentConfig, simulate_state, summarize
from apps.qmacro.BLL.Core.fiducial import fiducial_from_config

logger = logging.getLogger(__name__)


@shared_task(name="qmacro.simulate_state")
def simulate_state_task(config_payload: dict, index: int, fiducial_payload: dict | None = None) -> dict:
    """One ensemble member of the MSE benchmark; everything crosses the broker as JSON."""
    config = ExperimentConfig.from_dict(config_payload)
    xi = fiducial_from_config(fiducial_payload, config.N) if fiducial_payload else None
    return simulate_state(config, index, xi)


def run_benchmark_tasks(config: ExperimentConfig, fiducial_payload: dict | None = None, workers: int | None = None):
    """Fan out one task per state and aggregate in state-index order.

    Eager mode runs the tasks in-process, on a thread pool when workers > 1.
    """
    payload = config.to_dict()
    workers = workers or settings.QMACRO_WORKERS
    signatures = [simulate_state_task.s(payload, i, fiducial_payload) for i in range(config.ensemble_size)]
    if settings.CELERY_TASK_ALWAYS_EAGER:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                per_state = list(pool.map(lambda sig: sig.apply().get(), signatures))
        else:
            per_state = [sig.apply().get() for sig in signatures]
    else:
        logger.info("dispatching %d benchmark tasks", len(signatures))
        per_state = group(signatures).apply_async().get(disable_sync_subtasks=False)
    return summarize(config, per_state)
