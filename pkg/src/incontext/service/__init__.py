from .store import ResponseStore
from .sessions import (Session, SessionBook, SessionError,
                       InfeasibleSessionError, sample_session_slice,
                       MAX_PER_CATEGORY)
from .export import export_rows, export_csv, EXPORT_COLUMNS
from .app import create_app

__all__ = [
    "ResponseStore", "Session", "SessionBook", "SessionError",
    "InfeasibleSessionError", "sample_session_slice", "MAX_PER_CATEGORY",
    "export_rows", "export_csv", "EXPORT_COLUMNS", "create_app",
]
