from .logging import setup_logging
from .metrics import setup_metrics, track_solve
from .tracing import setup_tracing, trace_run

__all__ = ["setup_metrics", "setup_logging", "setup_tracing", "trace_run", "track_solve"]
