from .engine import (EVENT_SETS, EngineFault, EventRecorder, EventTable, KmcTrajectory,
                     SyndromeState, TableDecoder, ToricInline, run)
from .rates import InvalidParameter, gamma

__all__ = ["EVENT_SETS", "EngineFault", "EventRecorder", "EventTable", "KmcTrajectory",
           "SyndromeState", "TableDecoder", "ToricInline", "run", "InvalidParameter", "gamma"]
