"""
Run orchestrator: dispatches one CLI command to the library, writes the
report and turns exceptions into exit codes.

    0  success, every asserted property holds
    1  an asserted property failed (or an internal identity check)
    2  input or configuration error
    3  unexpected internal error
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from georisk.allocation import allocate
from georisk.cli.config import RunConfig, parse_grid
from georisk.cli.ingest import ScenarioData, ingest_scenarios, load_measure_spec_file, select_positions
from georisk.cli.report import write_json, write_table
from georisk.correspondence import (
    MONETARY,
    RETURN,
    PropertyReport,
    SamplerConfig,
    bridge_equivalences,
    classify,
    counterexamples_confirmed,
    qlc_counterexamples,
)
from georisk.correspondence.checkers import grid_result, margin_of
from georisk.database import RunArchive
from georisk.duality import RecoveryConfig, check_expansive, dense_grid_oracle_r, recover_r
from georisk.errors import ConfigurationError, ConsistencyError, InfeasibleError, InvalidInputError
from georisk.measures import MeasureSpec, build_dual_measure, build_measure
from georisk.portfolio import (
    LogConstraintFamily,
    PortfolioProblem,
    check_frontier,
    check_generalized_frontier,
    continuous_limit_wealth,
    efficient_frontier,
    generalized_frontier_logconstraint,
    wealth_buy_and_hold,
    wealth_rebalanced,
)
from georisk.settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROPERTY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3

INPUT_ERRORS = (InvalidInputError, ConfigurationError, InfeasibleError, ValidationError)
# recover-r reports |recovered - R| above this without failing the run
RECOVERY_MATCH_TOL = 2e-4


@dataclass
class CommandResult:
    """What a command hands back to the orchestrator"""

    report: Dict[str, Any]
    table: pd.DataFrame
    passed: bool = True
    checked: int = 0
    failed: List[str] = field(default_factory=list)


def _report_summary(report: PropertyReport) -> Dict[str, Any]:
    failed = [name for name, r in report.results.items() if not r.holds]
    return {'checked': len(report.results), 'failed': failed}


def _property_rows(report: PropertyReport, kind: str) -> List[Dict[str, Any]]:
    return [
        {'item': name, 'kind': kind, 'holds': r.holds, 'max_margin': r.max_margin}
        for name, r in report.results.items()
    ]


class RunOrchestrator:
    """Runs one command with logging, stats and an optional archive entry"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.start_time = time.time()
        self.stats = {
            'command': config.command,
            'properties_checked': 0,
            'properties_failed': 0,
            'rows_written': 0,
            'errors': 0,
        }
        self._data: Optional[ScenarioData] = None
        self._spec: Optional[MeasureSpec] = None
        self._tolerances: Dict[str, Any] = {}
        self._handlers: Dict[str, Callable[[], CommandResult]] = {
            'eval': self.run_eval,
            'classify': self.run_classify,
            'recover-r': self.run_recover_r,
            'frontier': self.run_frontier,
            'allocate': self.run_allocate,
            'simulate': self.run_simulate,
            'counterexamples': self.run_counterexamples,
        }

    # inputs

    @property
    def data(self) -> ScenarioData:
        if self._data is None:
            self._data = ingest_scenarios(self.config.scenarios_path)
        return self._data

    def _load_spec(self) -> MeasureSpec:
        if self._spec is None:
            self._spec, self._tolerances = load_measure_spec_file(self.config.measure_spec_path)
        return self._spec

    @property
    def spec(self) -> MeasureSpec:
        return self._load_spec()

    def sampler_config(self) -> SamplerConfig:
        if self.config.measure_spec_path is not None:
            self._load_spec()
        overrides = self.config.overrides(self._tolerances)
        unknown = sorted(set(overrides) - set(SamplerConfig.model_fields))
        if unknown:
            raise ConfigurationError(f"unknown tolerance overrides {unknown}, expected some of "
                                     f"{sorted(SamplerConfig.model_fields)}")
        return SamplerConfig(**overrides)

    def measure(self, side: Optional[str] = None):
        spec = self.spec if side is None else self.spec.on_side(side)
        return build_measure(spec, self.data.space, self.data.scenarios)

    # commands

    def run_eval(self) -> CommandResult:
        f = self.measure()
        names = None if self.config.position is None else [self.config.position]
        values = {name: f(x) for name, x in select_positions(self.data, names)}
        for name, value in values.items():
            logger.info(f"{f.name}({name}) = {value:.12g}")
        report = {'measure': f.name, 'side': f.side, 'values': values}
        table = pd.DataFrame({'position': list(values), 'value': list(values.values())})
        return CommandResult(report, table)

    def run_classify(self) -> CommandResult:
        config = self.sampler_config()
        f = self.measure()
        taxonomy = classify(f, config)
        report = {'measure': f.name, 'side': f.side, 'seed': config.seed, 'n_samples': config.n_samples,
                  'taxonomy': taxonomy.to_dict()}
        rows = [{'item': flag, 'kind': 'flag', 'holds': value, 'max_margin': math.nan}
                for flag, value in taxonomy.flags.items()]
        rows += _property_rows(taxonomy.report, 'property')
        result = CommandResult(report, pd.DataFrame(rows))
        # the paired verdicts on both sides must agree, the flags themselves are findings
        bridges = bridge_equivalences(self.measure(MONETARY), self.measure(RETURN), config)
        report['bridges'] = bridges.to_dict()
        rows_b = _property_rows(bridges, 'bridge')
        result.table = pd.concat([result.table, pd.DataFrame(rows_b)], ignore_index=True)
        summary = _report_summary(bridges)
        result.passed = bridges.all_hold
        result.checked, result.failed = summary['checked'], summary['failed']
        return result

    def run_recover_r(self) -> CommandResult:
        k = self.config.scenario
        t_grid = parse_grid(self.config.t_grid)
        recovery = RecoveryConfig(seed=self.config.seed)
        dual = None
        if self.spec.family == 'dual':
            dual = build_dual_measure(self.spec, self.data.space, self.data.scenarios)
        qs = dual.qs if dual is not None else self.data.scenarios
        if not 0 <= k < len(qs):
            raise ConfigurationError(f"--scenario {k} out of range, {len(qs)} scenarios available")
        f = self.measure(RETURN)
        q = qs[k]
        rows, bound_rows, match_rows = [], [], []
        for t in t_grid:
            t = float(t)
            recovered = recover_r(f, q, t, recovery)
            row = {'t': t, 'recovered': recovered, 'exact': math.nan, 'oracle': math.nan}
            if dual is not None:
                row['exact'] = dual.r.value(t, k)
                # log rho~ >= R(E_Q log X; Q) on the constraint, whatever the family
                bound_rows.append((margin_of(row['exact'], recovered), {'t': t}, row['exact'], recovered))
                match_rows.append((margin_of(recovered, row['exact'], equality=True), {'t': t}, recovered, row['exact']))
            if self.data.space.n == 2:
                row['oracle'] = dense_grid_oracle_r(f, q, t, recovery.bound)
            logger.debug(f"t={t:.6g}: recovered {recovered:.10g}")
            rows.append(row)
        table = pd.DataFrame(rows, columns=['t', 'recovered', 'exact', 'oracle'])
        report: Dict[str, Any] = {'measure': f.name, 'scenario': k, 'seed': self.config.seed,
                                  'bound': recovery.bound, 'rows': rows}
        checks = PropertyReport()
        if dual is not None:
            checks.add(grid_result('recovered_above_r', bound_rows, self.sampler_config().tolerance))
            report['r'] = dual.r.to_json()
            report['expansive'] = check_expansive(dual.r, dual.qs).to_dict()
            # recovery gives the largest R representing the measure, a given R may sit below it
            reproduction = grid_result('recovered_matches_r', match_rows, RECOVERY_MATCH_TOL)
            report['reproduction'] = reproduction.to_dict()
            if not reproduction.holds:
                logger.warning(f"Recovered R differs from the given R by up to {reproduction.max_margin:.3g}")
        report['checks'] = checks.to_dict()
        summary = _report_summary(checks)
        return CommandResult(report, table, checks.all_hold, summary['checked'], summary['failed'])

    def run_frontier(self) -> CommandResult:
        f = self.measure(RETURN)
        named = select_positions(self.data, self.config.assets)
        names = [name for name, _ in named]
        assets = tuple(x for _, x in named)
        r_grid = parse_grid(self.config.r_grid)
        seed = self.config.seed or 0
        if self.config.generalized:
            fam = LogConstraintFamily(assets, f)
            points = generalized_frontier_logconstraint(fam, r_grid)
            checks = check_generalized_frontier(fam, points, seed=seed)
        else:
            problem = PortfolioProblem(assets, math.inf, f)
            points = efficient_frontier(problem, r_grid)
            checks = check_frontier(problem, points, seed=seed)
        rows = []
        for pt in points:
            row = {'r': pt.r}
            weights = pt.w_star if pt.w_star is not None else np.full(len(names), math.nan)
            row.update({f"w_{i + 1}": float(w) for i, w in enumerate(weights)})
            row.update({'value': pt.value, 'status': pt.status})
            rows.append(row)
        report = {'measure': f.name, 'assets': names, 'generalized': self.config.generalized,
                  'points': [pt.to_dict() for pt in points], 'checks': checks.to_dict()}
        summary = _report_summary(checks)
        return CommandResult(report, pd.DataFrame(rows), checks.all_hold, summary['checked'], summary['failed'])

    def run_allocate(self) -> CommandResult:
        if self.spec.family != 'dual':
            raise ConfigurationError("'allocate' needs a measure spec of family 'dual'")
        m = build_dual_measure(self.spec, self.data.space, self.data.scenarios)
        units = select_positions(self.data, self.config.units)
        total = select_positions(self.data, [self.config.total])[0][1]
        result = allocate(m, [x for _, x in units], total, self.config.rule, self.config.composition)
        names = [name for name, _ in units]
        rows = [{'unit': name, 'rule': result.rule, 'allocation': a} for name, a in zip(names, result.allocations)]
        density = result.optimal_scenario.density
        rows += [{'unit': f"Q_X[{o}]", 'rule': 'scenario_density', 'allocation': float(d)}
                 for o, d in zip(self.data.space.outcomes, density)]
        report = {'units': names, 'total': self.config.total, **result.to_dict()}
        for name, a in zip(names, result.allocations):
            logger.info(f"{result.rule} allocation of {name}: {a:.12g}")
        return CommandResult(report, pd.DataFrame(rows))

    def run_simulate(self) -> CommandResult:
        named = select_positions(self.data, self.config.assets)
        names = [name for name, _ in named]
        # each position column is one asset's path of per-period gross returns, rows are periods
        paths = np.vstack([x.values for _, x in named])
        w = np.asarray(self.config.weights, dtype=float)
        K = self.config.steps
        wealth = {
            'buy_and_hold': wealth_buy_and_hold(w, paths),
            'rebalanced': wealth_rebalanced(w, paths, steps_per_period=K),
            'continuous_limit': continuous_limit_wealth(w, paths),
        }
        rows = [{'t': t, 'strategy': strategy, 'wealth': float(v)}
                for strategy, path in wealth.items() for t, v in enumerate(path)]
        report = {'assets': names, 'weights': w.tolist(), 'steps_per_period': K,
                  'wealth': {strategy: path.tolist() for strategy, path in wealth.items()}}
        return CommandResult(report, pd.DataFrame(rows, columns=['t', 'strategy', 'wealth']))

    def run_counterexamples(self) -> CommandResult:
        config = self.sampler_config()
        report = qlc_counterexamples(config)
        v = report.values
        inequalities = [
            ('logcoherent quasi-convexity failure', v['logcoherent.arithmetic_mix'],
             max(v['logcoherent.X'], v['logcoherent.Y'])),
            ('mean-value positive homogeneity failure', v['mean_value.scaled_X'], v['mean_value.lambda_times_X']),
        ]
        listed = []
        for label, lhs, rhs in inequalities:
            logger.info(f"{label}: {lhs:.4f} > {rhs:.4f} (margin {lhs - rhs:.6g})")
            listed.append({'label': label, 'lhs': lhs, 'rhs': rhs, 'margin': margin_of(lhs, rhs)})
        confirmed = counterexamples_confirmed(report)
        table = pd.DataFrame([
            {'check': name, 'holds': r.holds, 'max_margin': r.max_margin}
            for name, r in report.results.items()
        ])
        out = {'report': report.to_dict(), 'inequalities': listed, 'confirmed': confirmed}
        failed = [] if confirmed else ['counterexamples_confirmed']
        return CommandResult(out, table, confirmed, len(report.results), failed)

    # orchestration

    def _write(self, result: CommandResult):
        out = self.config.output
        if self.config.output_format == 'csv':
            write_table(result.table, out)
            self.stats['rows_written'] = len(result.table)
        else:
            write_json({'command': self.config.command, 'passed': result.passed, 'result': result.report}, out)

    def _write_error(self, e: Exception, code: int):
        if self.config.output_format != 'json':
            return
        error = {'type': type(e).__name__, 'message': str(e),
                 'row': getattr(e, 'row', None), 'column': getattr(e, 'column', None)}
        try:
            write_json({'command': self.config.command, 'exit_code': code, 'error': error}, self.config.output)
        except OSError as io_error:
            logger.error(f"Could not write the error report: {io_error}")

    def _archive(self, code: int, report: Optional[Dict[str, Any]]):
        path = self.config.archive or get_settings().archive_path
        if path is None:
            return
        try:
            with RunArchive(str(path)) as archive:
                archive.save_run(self.config.command, self.config.seed, self.config.to_record(), code, report)
        except Exception as e:
            logger.error(f"✗ Failed to archive the run: {e}", exc_info=True)

    def run(self) -> int:
        """Execute the configured command and return the exit code"""
        logger.info("=" * 80)
        logger.info(f"GEORISK {self.config.command.upper()}")
        logger.info("=" * 80)
        report = None
        try:
            result = self._handlers[self.config.command]()
            report = result.report
            self.stats['properties_checked'] = result.checked
            self.stats['properties_failed'] = len(result.failed)
            self._write(result)
            code = EXIT_OK if result.passed else EXIT_PROPERTY_FAILED
            for name in result.failed:
                logger.warning(f"✗ Asserted property failed: {name}")
        except ConsistencyError as e:
            logger.error(f"✗ Consistency check failed: {e}")
            self.stats['errors'] += 1
            code = EXIT_PROPERTY_FAILED
            self._write_error(e, code)
        except INPUT_ERRORS as e:
            logger.error(f"✗ Invalid input: {e}")
            self.stats['errors'] += 1
            code = EXIT_INPUT_ERROR
            self._write_error(e, code)
        except Exception as e:
            logger.error(f"Fatal error: {e}", exc_info=True)
            self.stats['errors'] += 1
            code = EXIT_INTERNAL_ERROR
            self._write_error(e, code)
        self._archive(code, report)
        self.print_final_summary(code)
        return code

    def print_final_summary(self, code: int):
        total_time = time.time() - self.start_time
        logger.info("\n" + "=" * 80)
        logger.info("RUN SUMMARY")
        logger.info("=" * 80)
        logger.info(f"Command: {self.stats['command']}")
        logger.info(f"Properties checked: {self.stats['properties_checked']} "
                    f"(failed: {self.stats['properties_failed']})")
        if self.stats['rows_written']:
            logger.info(f"CSV rows written: {self.stats['rows_written']}")
        logger.info(f"Errors: {self.stats['errors']}")
        logger.info(f"Exit code: {code}")
        logger.info(f"Total time: {total_time:.2f}s")
        logger.info("=" * 80)


def run(config: RunConfig) -> int:
    """Dispatch one validated configuration; returns the exit code"""
    return RunOrchestrator(config).run()
