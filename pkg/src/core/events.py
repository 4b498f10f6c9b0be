"""
Event System
Computations publish what happened (a verdict, a Monte Carlo fallback, a
rescaled problem); the CLI and tests listen without the publishers knowing
"""

import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Deque, Dict, List, Optional, Union

logger = logging.getLogger(__name__)


class EventType(str, Enum):
    # Verification
    CHECK_COMPLETED = "check_completed"

    # Measure engine
    ENUMERATION_STARTED = "enumeration_started"
    MC_FALLBACK = "mc_fallback"

    # Problems and estimators
    PROBLEM_RESCALED = "problem_rescaled"
    ZERO_POSTERIOR_BLOCK = "zero_posterior_block"

    # Experiments
    EXPERIMENT_POINT = "experiment_point"


Topic = Union[EventType, str]
Listener = Callable[['Event'], Any]


@dataclass(frozen=True)
class Event:
    """One published occurrence; data holds the publisher's keyword arguments"""
    type: Topic
    data: Dict[str, Any] = field(default_factory=dict)
    seq: int = 0


class EventManager:
    """
    Publish-subscribe hub

    Listeners run in subscription order. A listener that raises is logged and
    skipped; the remaining listeners still see the event.
    """

    def __init__(self):
        self._listeners: Dict[Topic, List[Listener]] = defaultdict(list)
        self._pending: Deque[Event] = deque()
        self._fired: Counter = Counter()
        self._queued = 0
        self._seq = 0

    def subscribe(self, topic: Topic, listener: Listener):
        listeners = self._listeners[topic]
        if listener not in listeners:
            listeners.append(listener)

    def unsubscribe(self, topic: Topic, listener: Listener):
        listeners = self._listeners.get(topic, [])
        if listener in listeners:
            listeners.remove(listener)

    def _make(self, topic: Topic, data: Dict[str, Any]) -> Event:
        self._seq += 1
        return Event(topic, data, self._seq)

    def publish(self, topic: Topic, **data):
        self._deliver(self._make(topic, data))

    def queue_event(self, topic: Topic, **data):
        """Hold an event until process_queued_events"""
        self._pending.append(self._make(topic, data))
        self._queued += 1

    def process_queued_events(self):
        while self._pending:
            self._deliver(self._pending.popleft())

    def _deliver(self, event: Event):
        self._fired[event.type] += 1
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("event #%d %s %s", event.seq, getattr(event.type, 'value', event.type), event.data)
        for listener in tuple(self._listeners.get(event.type, ())):
            try:
                listener(event)
            except Exception:
                logger.exception("listener %r failed on %s", listener, event.type)

    def clear_listeners(self, topic: Optional[Topic] = None):
        if topic is None:
            self._listeners.clear()
        else:
            self._listeners.pop(topic, None)

    def get_listener_count(self, topic: Optional[Topic] = None) -> int:
        if topic is not None:
            return len(self._listeners.get(topic, ()))
        return sum(map(len, self._listeners.values()))

    def get_stats(self) -> Dict[str, Any]:
        return {
            'events_fired': sum(self._fired.values()),
            'events_queued': self._queued,
            'pending': len(self._pending),
            'by_type': {getattr(t, 'value', t): count for t, count in self._fired.items()},
            'active_listeners': self.get_listener_count(),
        }


_manager: Optional[EventManager] = None


def get_event_manager() -> EventManager:
    global _manager
    if _manager is None:
        _manager = EventManager()
    return _manager


def subscribe(topic: Topic, listener: Listener):
    get_event_manager().subscribe(topic, listener)


def unsubscribe(topic: Topic, listener: Listener):
    get_event_manager().unsubscribe(topic, listener)


def publish(topic: Topic, **data):
    get_event_manager().publish(topic, **data)


def queue_event(topic: Topic, **data):
    get_event_manager().queue_event(topic, **data)


def process_events():
    get_event_manager().process_queued_events()
