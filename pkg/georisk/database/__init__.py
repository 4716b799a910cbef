"""
Run archive backed by SQLite
"""

from georisk.database.sqlite_manager import RunArchive

__all__ = [
    'RunArchive'
]
