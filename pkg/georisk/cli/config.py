"""
Validated run configuration for the batch CLI.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from georisk.errors import ConfigurationError

logger = logging.getLogger(__name__)

COMMANDS = ('eval', 'classify', 'recover-r', 'frontier', 'allocate', 'simulate', 'counterexamples')
SEEDED = frozenset({'classify', 'recover-r'})
NEEDS_SCENARIOS = frozenset(COMMANDS) - {'counterexamples'}
NEEDS_MEASURE = frozenset({'eval', 'classify', 'recover-r', 'frontier', 'allocate'})
OUTPUT_FORMATS = ('json', 'csv')


def parse_grid(text: str) -> np.ndarray:
    """'lo:step:hi' -> inclusive ascending grid"""
    try:
        lo, step, hi = (float(part) for part in text.split(':'))
    except ValueError as e:
        raise ConfigurationError(f"grid must read lo:step:hi, got '{text}'") from e
    if not step > 0 or hi < lo:
        raise ConfigurationError(f"grid '{text}' needs step > 0 and hi >= lo")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def parse_list(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    items = [item.strip() for item in text.split(',') if item.strip()]
    if not items:
        raise ConfigurationError("expected a comma-separated list")
    return items


class RunConfig(BaseModel):
    """One CLI invocation"""

    model_config = ConfigDict(frozen=True)

    command: Literal['eval', 'classify', 'recover-r', 'frontier', 'allocate', 'simulate', 'counterexamples']
    scenarios_path: Optional[Path] = None
    measure_spec_path: Optional[Path] = None
    seed: Optional[int] = None
    output: Optional[Path] = None
    position: Optional[str] = None
    assets: Optional[List[str]] = None
    t_grid: Optional[str] = None
    r_grid: Optional[str] = None
    generalized: bool = False
    scenario: int = 0
    units: Optional[List[str]] = None
    total: Optional[str] = None
    rule: str = 'subdifferential'
    composition: str = 'ratio'
    steps: int = Field(default=1, ge=1)
    weights: Optional[List[float]] = None
    samples: Optional[int] = Field(default=None, ge=1)
    tolerance: Optional[float] = Field(default=None, gt=0)
    archive: Optional[Path] = None

    @field_validator('scenarios_path', 'measure_spec_path')
    @classmethod
    def _file_exists(cls, value):
        if value is not None and not Path(value).is_file():
            raise ValueError(f"file not found: {value}")
        return value

    @field_validator('output')
    @classmethod
    def _known_suffix(cls, value):
        if value is not None and Path(value).suffix.lstrip('.') not in OUTPUT_FORMATS:
            raise ValueError(f"output must end in .json or .csv, got {value}")
        return value

    @model_validator(mode='after')
    def _required_inputs(self):
        if self.command in NEEDS_SCENARIOS and self.scenarios_path is None:
            raise ValueError(f"'{self.command}' needs --scenarios")
        if self.command in NEEDS_MEASURE and self.measure_spec_path is None:
            raise ValueError(f"'{self.command}' needs --measure")
        if self.command in SEEDED and self.seed is None:
            raise ValueError(f"'{self.command}' is sampled and needs --seed")
        if self.command == 'frontier' and self.r_grid is None:
            raise ValueError("'frontier' needs --r-grid")
        if self.command == 'recover-r' and self.t_grid is None:
            raise ValueError("'recover-r' needs --t-grid")
        if self.command == 'allocate' and (not self.units or self.total is None):
            raise ValueError("'allocate' needs --units and --total")
        if self.command == 'simulate' and self.weights is None:
            raise ValueError("'simulate' needs --w")
        for grid in (self.t_grid, self.r_grid):
            if grid is not None:
                parse_grid(grid)
        return self

    @property
    def output_format(self) -> str:
        return 'json' if self.output is None else self.output.suffix.lstrip('.')

    def overrides(self, spec_tolerances: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Sampler overrides: the measure file's "tolerances" first, then the CLI flags"""
        merged = dict(spec_tolerances or {})
        if self.samples is not None:
            merged['n_samples'] = self.samples
        if self.tolerance is not None:
            merged['tolerance'] = self.tolerance
        if self.seed is not None:
            merged['seed'] = self.seed
        return merged

    def to_record(self) -> Dict[str, Any]:
        """Plain data for the run archive"""
        return self.model_dump(mode='json')
