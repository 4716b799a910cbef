"""
Report serialization: JSON with 17 significant digits and sorted keys,
CSV through pandas with 12 significant digits.
"""

import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

JSON_DIGITS = 17
CSV_FLOAT_FORMAT = '%.12g'
_FLOAT_MARK = '@@float@@'
_FLOAT_TOKEN = re.compile(r'"' + _FLOAT_MARK + r'([^"]+)"')


def _plain(value: Any) -> Any:
    """Numbers, arrays and containers as JSON-ready data; floats become format tokens"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return f"{_FLOAT_MARK}{value:.{JSON_DIGITS}g}"
    return value


def to_json_text(report: Any) -> str:
    """Deterministic JSON text; non-finite floats are written as null"""
    text = json.dumps(_plain(report), sort_keys=True, indent=2, ensure_ascii=False)
    return _FLOAT_TOKEN.sub(r'\1', text) + '\n'


def write_json(report: Any, path: Optional[Path] = None):
    text = to_json_text(report)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding='utf-8')
    logger.info(f"✓ Report written to {path}")


def write_table(table: pd.DataFrame, path: Path):
    """CSV with a fixed float format and '\\n' line endings"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"✓ {len(table)} rows written to {path}")
