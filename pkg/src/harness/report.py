"""
Experiment reports: fixed-column CSV records, a JSON document with the config
echo, and a console summary table.

Numeric fields depend only on (config, seed). The wall clock lives outside
the records so repeated runs produce identical CSV files.
"""

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from tabulate import tabulate

from config.experiment_kinds import Verdict
from src import __version__
from src.core.error_handler import ConfigError
from src.core.logger import get_logger
from src.core.settings import SETTINGS
from src.utils.format import format_float, format_time_delta, format_verdict, format_window

logger = get_logger(__name__)

CSV_COLUMNS = (
    'experiment', 'd', 'window', 'p', 'r', 'replication',
    'statistic', 'value', 'ci_lo', 'ci_hi', 'verdict', 'seed'
)

@dataclass(frozen=True)
class Record:
    """
    One report row.

    replication is None for aggregates; verdict is None for plain
    measurements.
    """
    experiment: str
    d: int
    window: str
    statistic: str
    value: float
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    p: Optional[float] = None
    r: Optional[float] = None
    replication: Optional[int] = None
    verdict: Optional[str] = None
    seed: Optional[int] = None

    def row(self) -> Dict[str, str]:
        return {
            'experiment': self.experiment,
            'd': str(self.d),
            'window': self.window,
            'p': format_float(self.p),
            'r': format_float(self.r),
            'replication': '' if self.replication is None else str(self.replication),
            'statistic': self.statistic,
            'value': format_float(self.value),
            'ci_lo': format_float(self.ci_lo),
            'ci_hi': format_float(self.ci_hi),
            'verdict': self.verdict or '',
            'seed': '' if self.seed is None else str(self.seed),
        }

@dataclass
class Report:
    """Records of one experiment run plus its provenance."""
    experiment: str
    d: int
    seed: int
    config: Dict[str, Any] = field(default_factory=dict)
    records: List[Record] = field(default_factory=list)
    version: str = __version__
    wall_clock: float = 0.0

    def add(self, statistic: str, value: float, window: Sequence[int] = (), **fields) -> Record:
        """Append a record; window is given as sizes."""
        record = Record(self.experiment, self.d, format_window(window), statistic, float(value), **fields)
        self.records.append(record)
        return record

    def add_verdict(self, statistic: str, value: float, passed: bool, window: Sequence[int] = (),
                    binding: bool = True, detail: str = '', **fields) -> Record:
        """
        Append a verdict record and log it on the console.

        Non-binding checks are stored as RECORDED whatever their outcome.
        """
        if binding:
            status = Verdict.PASS if passed else Verdict.FAIL
        else:
            status = Verdict.RECORDED
        record = self.add(statistic, value, window, verdict=status.value, **fields)
        outcome = '' if binding else (' (holds)' if passed else ' (fails)')
        logger.verdict(format_verdict(self.experiment, status.value,
                                      f"{statistic}={format_float(value)}{outcome} {detail}".rstrip()))
        return record

    @property
    def verdicts(self) -> List[Record]:
        return [r for r in self.records if r.verdict in (Verdict.PASS.value, Verdict.FAIL.value)]

    @property
    def passed(self) -> bool:
        return all(r.verdict == Verdict.PASS.value for r in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_csv(self, path: Path):
        with open(path, 'w', newline='') as file:
            writer = csv.DictWriter(file, fieldnames=CSV_COLUMNS, lineterminator='\n')
            writer.writeheader()
            for record in self.records:
                writer.writerow(record.row())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'experiment': self.experiment,
            'd': self.d,
            'seed': self.seed,
            'version': self.version,
            'wall_clock': self.wall_clock,
            'config': self.config,
            'records': [asdict(record) for record in self.records],
        }

    def to_json(self, path: Path):
        with open(path, 'w') as file:
            json.dump(self.to_dict(), file, indent=2)
            file.write('\n')

    def write(self, path, fmt: Optional[str] = None):
        """Write the report as csv or json (format from the suffix when not given)."""
        path = Path(path)
        fmt = fmt or ('json' if path.suffix == '.json' else SETTINGS['report']['default_format'])
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == 'json':
            self.to_json(path)
        else:
            self.to_csv(path)
        logger.info(f"Wrote {len(self.records)} records to {path} ({fmt})")

    @classmethod
    def from_json(cls, path) -> 'Report':
        """
        Load a report written by to_json.

        Raises:
            ConfigError: If the file is missing or is not a report document
        """
        path = Path(path)
        try:
            with open(path, 'r') as file:
                data = json.load(file)
            records = [Record(**entry) for entry in data['records']]
            return cls(data['experiment'], data['d'], data['seed'], data.get('config', {}),
                       records, data.get('version', __version__), data.get('wall_clock', 0.0))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"cannot read report {path}: {e}")

    def summary(self) -> str:
        """Console table of the verdict records (all records when there are none)."""
        rows = [r for r in self.records if r.verdict] or self.records
        table = tabulate(
            [[r.window, r.statistic, format_float(r.value), format_float(r.ci_hi), r.verdict or '']
             for r in rows],
            headers=['window', 'statistic', 'value', 'ci_hi', 'verdict'],
            tablefmt=SETTINGS['report']['table_format'],
        )
        footer = (f"{self.experiment} v{self.version} seed={self.seed} "
                  f"wall clock {format_time_delta(self.wall_clock)}")
        return f"{table}\n{footer}"
