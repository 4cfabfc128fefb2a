from typing import Optional


class HybridError(Exception):
    """Base class of execution errors. `partial_trace` is attached by `simulate`."""

    def __init__(self, message: str, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class IntegrationDiverged(HybridError):
    pass


class InvariantExit(HybridError):
    """Raised when a continuous step leaves the invariant; `state` is the offending point."""

    def __init__(self, message: str, state=None, partial_trace=None):
        super().__init__(message, partial_trace)
        self.state = state


class ResetContractError(HybridError):
    def __init__(self, message: str, transition_id: Optional[int] = None, state=None, partial_trace=None):
        super().__init__(message, partial_trace)
        self.transition_id = transition_id
        self.state = state


class TransitionNotEnabled(HybridError):
    pass


class AutomatonDefinitionError(HybridError):
    pass
