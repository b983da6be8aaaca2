"""
sbamix.progress
~~~~~~~~~~~~~~~
Thread-local progress emitter.

Samplers call ``emit(msg)`` at fixed iteration intervals.  It:

1. Logs *msg* at INFO on the ``sbamix.progress`` logger.
2. If a callback has been registered for the current thread via
   ``set_callback()``, also calls that callback.  Chains run in worker
   threads, so each worker registers the callback itself::

    from sbamix import progress as _progress

    def _run(index):
        _progress.set_callback(lambda msg: console.print(f"[chain {index}] {msg}"))
        try:
            ...         # run_chain(...)
        finally:
            _progress.clear_callback()
"""

from __future__ import annotations

import logging
import threading
from typing import Callable, Optional

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

_local = threading.local()


def set_callback(cb: Callable[[str], None]) -> None:
    """Register a progress callback for the current thread."""
    _local.callback = cb


def clear_callback() -> None:
    """Remove any registered callback from the current thread."""
    _local.callback = None


def get_callback() -> Optional[Callable[[str], None]]:
    return getattr(_local, "callback", None)


def emit(msg: str) -> None:
    """Log *msg* and forward it to any registered callback."""
    logger.info(msg)
    cb = get_callback()
    if cb is not None:
        try:
            cb(msg)
        except Exception:
            logger.debug("Progress callback raised; ignoring", exc_info=True)
