import logging
import multiprocessing

from django.conf import settings


logger = logging.getLogger(__name__)


def map_ordered(func, items, workers=None) -> list:
    """
    Apply func to every item, in a process pool when more than one worker is configured.

    Results keep the order of ``items`` so aggregates do not depend on the worker count.
    ``func`` must be a module-level function.

    """
    items = list(items)
    if workers is None:
        workers = settings.SIMULATION['WORKERS']

    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.info("Dispatching %d tasks to %d workers", len(items), workers)
    with multiprocessing.Pool(processes=min(workers, len(items))) as pool:
        return pool.map(func, items)
