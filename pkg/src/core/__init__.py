"""
Core systems package
"""

from src.core.events import (
    EventManager,
    Event,
    EventType,
    get_event_manager,
    subscribe,
    unsubscribe,
    publish,
    queue_event,
    process_events
)

from src.core.commands import (
    Command,
    CommandType,
    CommandOutcome,
    CommandManager,
)

from src.core.config import (
    Config,
    get_config,
    set_config,
    setting,
    tolerance,
)

from src.core.errors import (
    ComplexityError,
    MalformedSpec,
    AssumptionViolated,
    IndexOutOfRange,
    EnumerationCapExceeded,
    BadPartition,
    DegeneratePrior,
    AbsoluteContinuityViolated,
    DegenerateExcess,
    DiameterViolated,
    PreconditionFailed,
    NotLogLoss,
    EmptyGrid,
    DivisionBySupportMismatch,
)

from src.core.results import (
    CheckStatus,
    VerificationResult,
    inequality_result,
    identity_result,
    combine_results,
)

__all__ = [
    # Events
    'EventManager', 'Event', 'EventType',
    'get_event_manager', 'subscribe', 'unsubscribe', 'publish', 'queue_event', 'process_events',
    # Commands
    'Command', 'CommandType', 'CommandOutcome', 'CommandManager',
    # Config
    'Config', 'get_config', 'set_config', 'setting', 'tolerance',
    # Errors
    'ComplexityError', 'MalformedSpec', 'AssumptionViolated', 'IndexOutOfRange',
    'EnumerationCapExceeded', 'BadPartition', 'DegeneratePrior', 'AbsoluteContinuityViolated',
    'DegenerateExcess', 'DiameterViolated', 'PreconditionFailed', 'NotLogLoss', 'EmptyGrid',
    'DivisionBySupportMismatch',
    # Results
    'CheckStatus', 'VerificationResult', 'inequality_result', 'identity_result', 'combine_results',
]
