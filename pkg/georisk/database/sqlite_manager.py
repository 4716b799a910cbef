"""
SQLite archive of CLI runs: configuration, exit code and report per run.
"""

import sqlite3
import logging
import json
from pathlib import Path
from typing import List, Dict, Optional, Any
from datetime import datetime

from georisk.errors import ConfigurationError
from georisk.settings import get_settings

logger = logging.getLogger(__name__)


class RunArchive:
    """Stores one row per CLI run"""

    def __init__(self, db_path: str = None):
        """
        Open (and create if needed) the archive

        Args:
            db_path: Path to the SQLite file, GEORISK_ARCHIVE_PATH when omitted
        """
        self.db_path = db_path or get_settings().archive_path
        if not self.db_path:
            raise ConfigurationError("no archive path given and GEORISK_ARCHIVE_PATH is unset")
        self._ensure_db_directory()
        self.conn = self._create_connection()
        self._initialize_database()

    def _ensure_db_directory(self):
        """Ensure the directory for the database file exists"""
        db_dir = Path(self.db_path).parent
        db_dir.mkdir(parents=True, exist_ok=True)

    def _create_connection(self):
        try:
            return sqlite3.connect(self.db_path)
        except sqlite3.Error as e:
            logger.error(f"Error connecting to run archive: {e}")
            raise

    def _initialize_database(self):
        """Create the runs table and its indexes"""
        try:
            cursor = self.conn.cursor()
            cursor.execute('''
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                seed INTEGER,
                config_json TEXT NOT NULL,
                exit_code INTEGER NOT NULL,
                report_json TEXT,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
            ''')
            cursor.execute('CREATE INDEX IF NOT EXISTS idx_runs_command ON runs(command)')
            cursor.execute('CREATE INDEX IF NOT EXISTS idx_runs_created_at ON runs(created_at)')
            self.conn.commit()
            logger.debug("Run archive tables initialized")
        except sqlite3.Error as e:
            logger.error(f"Error initializing run archive: {e}")
            raise

    def save_run(self, command: str, seed: Optional[int], config: Dict[str, Any], exit_code: int,
                 report: Optional[Dict[str, Any]] = None) -> int:
        """
        Archive one run

        Args:
            command: CLI command name
            seed: sampling seed, if any
            config: run configuration as plain data
            exit_code: process exit code
            report: report written by the run

        Returns:
            int: id of the new row
        """
        try:
            cursor = self.conn.cursor()
            cursor.execute('''
            INSERT INTO runs (command, seed, config_json, exit_code, report_json, created_at)
            VALUES (?, ?, ?, ?, ?, ?)
            ''', (
                command,
                seed,
                json.dumps(config, sort_keys=True, default=str),
                exit_code,
                None if report is None else json.dumps(report, sort_keys=True, default=str),
                datetime.utcnow().isoformat(),
            ))
            self.conn.commit()
            logger.info(f"✓ Run archived as #{cursor.lastrowid} in {self.db_path}")
            return cursor.lastrowid
        except sqlite3.Error as e:
            logger.error(f"Error archiving run: {e}")
            self.conn.rollback()
            raise

    def _row_to_dict(self, cursor, row) -> Dict[str, Any]:
        columns = [column[0] for column in cursor.description]
        record = dict(zip(columns, row))
        for key in ('config_json', 'report_json'):
            if record.get(key) is not None:
                record[key] = json.loads(record[key])
        return record

    def get_run(self, run_id: int) -> Optional[Dict[str, Any]]:
        """
        Retrieve one archived run

        Returns:
            Optional[Dict]: the run with decoded JSON columns, None if absent
        """
        try:
            cursor = self.conn.cursor()
            cursor.execute('SELECT * FROM runs WHERE id = ?', (run_id,))
            row = cursor.fetchone()
            if not row:
                return None
            return self._row_to_dict(cursor, row)
        except sqlite3.Error as e:
            logger.error(f"Error retrieving run {run_id}: {e}")
            return None

    def list_runs(self, command: Optional[str] = None, limit: int = 50) -> List[Dict[str, Any]]:
        """Most recent runs first, optionally for one command"""
        try:
            cursor = self.conn.cursor()
            if command is None:
                cursor.execute('SELECT * FROM runs ORDER BY id DESC LIMIT ?', (limit,))
            else:
                cursor.execute('SELECT * FROM runs WHERE command = ? ORDER BY id DESC LIMIT ?', (command, limit))
            return [self._row_to_dict(cursor, row) for row in cursor.fetchall()]
        except sqlite3.Error as e:
            logger.error(f"Error listing runs: {e}")
            return []

    def close(self):
        """Close the database connection"""
        if hasattr(self, 'conn'):
            self.conn.close()
            logger.debug("Run archive connection closed")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
