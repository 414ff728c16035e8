"""
Run Ledger
Records every simulator run and its artifacts in a SQLite database
"""

import sqlite3
import json
import logging
from datetime import datetime
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)


class RunLedger:
    """Keeps a history of runs, their provenance and what they wrote"""

    def __init__(self, db_path: str = "./ledger.db"):
        self.db_path = str(db_path)
        self._initialize_database()

    def _initialize_database(self):
        """Create ledger tables"""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                experiment TEXT NOT NULL,
                config_hash TEXT NOT NULL,
                version TEXT NOT NULL,
                status TEXT NOT NULL,
                exit_code INTEGER NOT NULL,
                duration_s REAL,
                metrics TEXT,
                message TEXT,
                timestamp DATETIME DEFAULT CURRENT_TIMESTAMP
            )
        """)

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS artifacts (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                run_id INTEGER NOT NULL,
                name TEXT NOT NULL,
                path TEXT NOT NULL,
                kind TEXT,
                FOREIGN KEY (run_id) REFERENCES runs (id)
            )
        """)

        conn.commit()
        conn.close()

    def record_run(
        self,
        experiment: str,
        config_hash: str,
        version: str,
        exit_code: int,
        duration_s: Optional[float] = None,
        metrics: Optional[Dict] = None,
        message: Optional[str] = None
    ) -> int:
        """
        Record one finished run

        Args:
            experiment: Experiment name
            config_hash: SHA-256 of the canonical configuration
            version: Simulator version
            exit_code: Process exit code of the run
            duration_s: Wall-clock duration
            metrics: JSON-serializable summary metrics
            message: Result or error message

        Returns:
            Run ID
        """
        status = 'success' if exit_code == 0 else 'failed'
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute("""
            INSERT INTO runs (experiment, config_hash, version, status, exit_code, duration_s, metrics, message)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?)
        """, (experiment, config_hash, version, status, exit_code, duration_s,
              json.dumps(metrics or {}, default=str), message))

        run_id = cursor.lastrowid

        conn.commit()
        conn.close()
        logger.debug("ledger: run %d (%s) recorded with status %s", run_id, experiment, status)
        return run_id

    def record_artifacts(self, run_id: int, artifacts: Dict[str, str], kinds: Optional[Dict[str, str]] = None):
        """Attach written files to a run"""
        kinds = kinds or {}
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.executemany("""
            INSERT INTO artifacts (run_id, name, path, kind) VALUES (?, ?, ?, ?)
        """, [(run_id, name, str(path), kinds.get(name)) for name, path in artifacts.items()])

        conn.commit()
        conn.close()

    def get_run(self, run_id: int) -> Optional[Dict]:
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute("""
            SELECT experiment, config_hash, version, status, exit_code, duration_s, metrics, message
            FROM runs WHERE id = ?
        """, (run_id,))
        row = cursor.fetchone()

        if not row:
            conn.close()
            return None

        cursor.execute("SELECT name, path FROM artifacts WHERE run_id = ? ORDER BY id", (run_id,))
        artifacts = {name: path for name, path in cursor.fetchall()}
        conn.close()

        return {
            'id': run_id,
            'experiment': row[0],
            'config_hash': row[1],
            'version': row[2],
            'status': row[3],
            'exit_code': row[4],
            'duration_s': row[5],
            'metrics': json.loads(row[6]) if row[6] else {},
            'message': row[7],
            'artifacts': artifacts
        }

    def find_runs(self, config_hash: str) -> List[int]:
        """IDs of earlier runs with the same configuration"""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()
        cursor.execute("SELECT id FROM runs WHERE config_hash = ? ORDER BY id", (config_hash,))
        ids = [r[0] for r in cursor.fetchall()]
        conn.close()
        return ids

    def get_run_stats(self) -> Dict:
        """Get overall run statistics"""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute("SELECT COUNT(*) FROM runs")
        total_runs = cursor.fetchone()[0]

        cursor.execute("SELECT COUNT(*) FROM runs WHERE exit_code = 0")
        successful = cursor.fetchone()[0]

        # Per-experiment breakdown
        cursor.execute("""
            SELECT experiment, COUNT(*) as count, AVG(duration_s) as avg_duration
            FROM runs
            GROUP BY experiment
            ORDER BY experiment
        """)
        experiment_stats = cursor.fetchall()

        # Recent failures
        cursor.execute("""
            SELECT experiment, exit_code, message
            FROM runs
            WHERE exit_code != 0
            ORDER BY id DESC
            LIMIT 5
        """)
        failures = cursor.fetchall()

        conn.close()

        return {
            'total_runs': total_runs,
            'successful_runs': successful,
            'success_rate': round(successful / total_runs, 3) if total_runs else 0.0,
            'experiment_stats': [
                {'experiment': e[0], 'count': e[1], 'avg_duration_s': round(e[2] or 0.0, 3)}
                for e in experiment_stats
            ],
            'recent_failures': [
                {'experiment': f[0], 'exit_code': f[1], 'message': f[2]}
                for f in failures
            ]
        }

    def export_ledger_data(self, output_path: str = "./ledger_export.json"):
        """Export all runs and artifacts as JSON"""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute("SELECT * FROM runs")
        run_data = cursor.fetchall()

        cursor.execute("SELECT * FROM artifacts")
        artifact_data = cursor.fetchall()

        conn.close()

        export_data = {
            'runs': run_data,
            'artifacts': artifact_data,
            'export_timestamp': datetime.now().isoformat()
        }

        with open(output_path, 'w') as f:
            json.dump(export_data, f, indent=2)
        return output_path
