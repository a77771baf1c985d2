import logging

from .event_types import ERROR_EVENTS, WARNING_EVENTS
from .message_builder import build_message

logger = logging.getLogger("estimation.events")


def log_event(event_type, metadata=None, *, run=None):
    metadata = metadata or {}
    message = build_message(event_type, metadata)

    if event_type in ERROR_EVENTS:
        level = logging.ERROR
    elif event_type in WARNING_EVENTS:
        level = logging.WARNING
    else:
        level = logging.INFO
    logger.log(level, message)

    if run is not None:
        from ..helpers import jsonable
        from ..models import RunEvent

        RunEvent.objects.create(
            run=run,
            event_type=event_type,
            message=message,
            metadata=jsonable(metadata),
        )
    return message
