"""
Scenario CSV and measure-spec ingestion.

Scenario CSV layout::

    outcome,p,d1,d2,X,Y
    w1,0.5,1.2,0.8,1.0,7.38905609893065
    w2,0.5,0.8,1.2,20.085536923187668,7.38905609893065

`outcome` and `p` are mandatory, columns named d<k> are scenario densities
dQ_k/dP (ordered by k), every other column is a position.
"""

import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from georisk.errors import IngestError
from georisk.measures import MeasureSpec, load_measure_spec
from georisk.prob_core import Position, ProbSpace, Scenario, ScenarioSet
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ('outcome', 'p')
DENSITY_COLUMN = re.compile(r'^d(\d+)$')
# header is line 1 of the file, first data row is line 2
FIRST_DATA_LINE = 2


class ScenarioData(NamedTuple):
    space: ProbSpace
    scenarios: ScenarioSet
    positions: Dict[str, Position]


def _line(index: int) -> int:
    return index + FIRST_DATA_LINE


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise IngestError(f"scenario file {path} is empty") from e
    except pd.errors.ParserError as e:
        # pandas reports the offending line as "... in line N, saw M"
        match = re.search(r'line (\d+)', str(e))
        raise IngestError(f"ragged row in {path}: {e}", row=int(match.group(1)) if match else None) from e
    # pandas renames repeated headers (X, X.1), so check the raw header line
    header = pd.read_csv(path, header=None, nrows=1, dtype=str, keep_default_na=False).iloc[0]
    header = header.str.strip()
    repeated = header[header.duplicated()].tolist()
    if repeated:
        raise IngestError("duplicate column header", row=1, column=repeated[0])
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    for i, cell in enumerate(raw):
        if not isinstance(cell, str) or cell.strip() == '':
            raise IngestError("missing value (ragged row)", row=_line(i), column=column)
    values = pd.to_numeric(raw, errors='coerce').to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise IngestError(f"value '{raw.iloc[bad[0]]}' is not a finite number", row=_line(bad[0]), column=column)
    return values


def _density_columns(columns: Sequence[str]) -> List[str]:
    matched = [(int(DENSITY_COLUMN.match(c).group(1)), c) for c in columns if DENSITY_COLUMN.match(c)]
    return [c for _, c in sorted(matched)]


def _build_space(frame: pd.DataFrame) -> ProbSpace:
    outcomes = [o.strip() for o in frame['outcome']]
    for i, o in enumerate(outcomes):
        if not o:
            raise IngestError("missing outcome identifier", row=_line(i), column='outcome')
    seen = {}
    for i, o in enumerate(outcomes):
        if o in seen:
            raise IngestError(f"duplicate outcome '{o}' (first on line {_line(seen[o])})", row=_line(i),
                              column='outcome')
        seen[o] = i
    p = _numeric_column(frame, 'p')
    bad = np.flatnonzero(p <= 0)
    if bad.size:
        raise IngestError(f"probability {p[bad[0]]!r} must be > 0", row=_line(bad[0]), column='p')
    total = math.fsum(p)
    if abs(total - 1.0) > get_settings().prob_tol:
        raise IngestError(f"probabilities sum to {total!r}, expected 1", column='p')
    return ProbSpace(tuple(outcomes), p)


def _build_scenarios(frame: pd.DataFrame, space: ProbSpace, columns: Sequence[str]) -> ScenarioSet:
    if not columns:
        logger.debug("No density columns, using the reference measure as the only scenario")
        return ScenarioSet.of(Scenario.reference(space))
    scenarios = []
    for column in columns:
        density = _numeric_column(frame, column)
        bad = np.flatnonzero(density < 0)
        if bad.size:
            raise IngestError(f"density {density[bad[0]]!r} must be >= 0", row=_line(bad[0]), column=column)
        mass = math.fsum(space.p * density)
        if abs(mass - 1.0) > get_settings().prob_tol:
            # densities are never renormalized
            raise IngestError(f"density has total mass {mass!r} under p, expected 1", column=column)
        scenarios.append(Scenario(space, density, label=column))
    return ScenarioSet(tuple(scenarios))


def ingest_scenarios(path) -> ScenarioData:
    """
    Parse a scenario CSV into validated objects

    Args:
        path: CSV file

    Returns:
        ScenarioData: (space, scenario set, positions by column name)

    Raises:
        IngestError: with the offending row (file line) and column
    """
    path = Path(path)
    frame = _read_frame(path)
    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise IngestError(f"scenario file lacks required columns {missing}", column=missing[0])
    if frame.empty:
        raise IngestError("scenario file has no outcome rows")

    space = _build_space(frame)
    densities = _density_columns(frame.columns)
    scenarios = _build_scenarios(frame, space, densities)
    positions = {}
    for column in frame.columns:
        if column in REQUIRED_COLUMNS or column in densities:
            continue
        positions[column] = Position(space, _numeric_column(frame, column))
    logger.info(f"Loaded {space.n} outcomes, {len(scenarios)} scenarios and {len(positions)} positions from {path}")
    return ScenarioData(space, scenarios, positions)


def select_positions(data: ScenarioData, names: Optional[Sequence[str]]) -> List[Tuple[str, Position]]:
    """Named positions in the requested order, or every position column"""
    if names is None:
        if not data.positions:
            raise IngestError("scenario file has no position columns")
        return list(data.positions.items())
    out = []
    for name in names:
        if name not in data.positions:
            raise IngestError(f"unknown position column, available: {sorted(data.positions)}", column=name)
        out.append((name, data.positions[name]))
    return out


def load_measure_spec_file(path) -> Tuple[MeasureSpec, Dict[str, Any]]:
    """
    Read a measure spec JSON file

    Returns:
        (MeasureSpec, tolerance overrides from the optional "tolerances" key)
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise IngestError(f"measure spec {path} is not valid JSON: {e.msg}", row=e.lineno) from e
    if not isinstance(data, dict):
        raise IngestError(f"measure spec {path} must be a JSON object")
    tolerances = data.get('tolerances') or {}
    if not isinstance(tolerances, dict):
        raise IngestError("'tolerances' must be an object", column='tolerances')
    try:
        tolerances = {str(k): float(v) if k != 'n_samples' else int(v) for k, v in tolerances.items()}
    except (TypeError, ValueError) as e:
        raise IngestError(f"non-numeric tolerance override: {e}", column='tolerances') from e
    spec = load_measure_spec(data)
    logger.info(f"Measure spec {spec.label()} on the {spec.side} side")
    return spec, tolerances
