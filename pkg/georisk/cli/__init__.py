"""
Batch command line: scenario ingestion, run configuration, dispatch and reports
"""

from georisk.cli.config import COMMANDS, RunConfig, parse_grid
from georisk.cli.ingest import ScenarioData, ingest_scenarios, select_positions, load_measure_spec_file
from georisk.cli.report import to_json_text, write_json, write_table
from georisk.cli.runner import (
    EXIT_OK,
    EXIT_PROPERTY_FAILED,
    EXIT_INPUT_ERROR,
    EXIT_INTERNAL_ERROR,
    RunOrchestrator,
    run,
)
from georisk.cli.parser import build_parser, cli_main

__all__ = [
    'COMMANDS',
    'RunConfig',
    'parse_grid',
    'ScenarioData',
    'ingest_scenarios',
    'select_positions',
    'load_measure_spec_file',
    'to_json_text',
    'write_json',
    'write_table',
    'EXIT_OK',
    'EXIT_PROPERTY_FAILED',
    'EXIT_INPUT_ERROR',
    'EXIT_INTERNAL_ERROR',
    'RunOrchestrator',
    'run',
    'build_parser',
    'cli_main',
]
