"""
Sampled axiom checks for log-risk acceptance families.

Star-shapedness and positive homogeneity compare tight levels b*(X) rather
than grid levels, and reuse the generator keys of the matching functional
properties: for a family built from rho~ the margins coincide with those of
check_property(rho~, 'star_shaped') and check_property(rho~, 'positively_homogeneous').
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize

from georisk.acceptance.family import LogRiskAcceptanceFamily, family_from_measure, in_monetary_acceptance, tight_level
from georisk.correspondence.checkers import (
    LEVEL_BRACKET,
    PropertyReport,
    PropertyResult,
    SamplerConfig,
    draw_samples,
    grid_result,
    property_key,
)
from georisk.correspondence.functional import MONETARY, RETURN, RiskFunctional, to_return
from georisk.errors import InvalidInputError
from georisk.prob_core import Position

logger = logging.getLogger(__name__)

FAMILY_AXIOMS = (
    'increasing_in_level',
    'monotone',
    'logconvex',
    'right_continuous',
    'star_shaped',
    'positively_homogeneous',
)

Row = Tuple[float, Dict[str, Any], float, float]


def _log_tight(fam: LogRiskAcceptanceFamily, values: np.ndarray) -> Optional[float]:
    b = tight_level(fam, Position(fam.space, values))
    if b == 0.0 or not math.isfinite(b):
        return None
    return math.log(b)


def _flag_row(violated: bool, inputs: Dict[str, Any]) -> Row:
    return (1.0 if violated else 0.0, inputs, float(violated), 0.0)


def _scaling_rows(fam: LogRiskAcceptanceFamily, config: SamplerConfig, prop: str) -> List[Row]:
    rows = []
    for draw in draw_samples(fam.space, config, property_key(RETURN, prop)):
        if prop == 'star_shaped':
            lam = math.exp(3.0 * draw.u)
        else:
            lam = math.exp(-1.0 + 2.0 * draw.u)
        scaled = _log_tight(fam, np.exp(-draw.z1))
        base = _log_tight(fam, np.exp(-draw.z1) / lam)
        if scaled is None or base is None:
            logger.debug(f"{prop}: sample {draw.index} has no finite tight level, skipped")
            continue
        lhs, rhs = math.log(lam) + scaled, base
        margin = abs(lhs - rhs) if prop == 'positively_homogeneous' else lhs - rhs
        rows.append((margin, {'index': draw.index, 'lambda': lam, 'z1': draw.z1.tolist()}, lhs, rhs))
    return rows


def check_B_star_shaped(fam: LogRiskAcceptanceFamily, config: Optional[SamplerConfig] = None) -> PropertyResult:
    """X in B^b implies lambda X in B^(b/lambda) for every lambda >= 1"""
    config = config or SamplerConfig()
    return grid_result('star_shaped', _scaling_rows(fam, config, 'star_shaped'),
                       config.tolerance, config.confirm_margin)


def check_B_positively_homogeneous(fam: LogRiskAcceptanceFamily,
                                   config: Optional[SamplerConfig] = None) -> PropertyResult:
    """gamma X in B^(b/gamma) if and only if X in B^b, for every gamma > 0"""
    config = config or SamplerConfig()
    return grid_result('positively_homogeneous', _scaling_rows(fam, config, 'positively_homogeneous'),
                       config.tolerance, config.confirm_margin)


def _monotone_rows(fam: LogRiskAcceptanceFamily, config: SamplerConfig) -> List[Row]:
    # Y = exp(-z1) dominates X = exp(-z1 - bump)
    rows = []
    for draw in draw_samples(fam.space, config, property_key(RETURN, 'monotone')):
        low = _log_tight(fam, np.exp(-draw.z1 - draw.bump))
        high = _log_tight(fam, np.exp(-draw.z1))
        if low is None or high is None:
            continue
        rows.append((high - low, {'index': draw.index, 'z1': draw.z1.tolist()}, high, low))
    return rows


def _matching_shift(fam: LogRiskAcceptanceFamily, z1: np.ndarray, z2: np.ndarray) -> float:
    target = _log_tight(fam, np.exp(-z1))
    if target is None:
        return 0.0

    def excess(s: float) -> float:
        level = _log_tight(fam, np.exp(-z2 - s))
        return math.nan if level is None else level - target

    lo, hi = excess(-LEVEL_BRACKET), excess(LEVEL_BRACKET)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo * hi >= 0:
        return 0.0
    return optimize.brentq(excess, -LEVEL_BRACKET, LEVEL_BRACKET, xtol=1e-12)


def _logconvex_rows(fam: LogRiskAcceptanceFamily, config: SamplerConfig) -> List[Row]:
    """1/X, 1/Y in B^b implies 1/(X^a Y^(1-a)) in B^b, in tight-level form"""
    rows = []
    for draw in draw_samples(fam.space, config, property_key(RETURN, 'quasi_logconvex')):
        z2 = draw.z2
        if config.level_matching and draw.index % 2 == 1:
            z2 = z2 + _matching_shift(fam, draw.z1, z2)
        a = 0.01 + 0.98 * draw.u
        first = _log_tight(fam, np.exp(-draw.z1))
        second = _log_tight(fam, np.exp(-z2))
        mixed = _log_tight(fam, np.exp(-(a * draw.z1 + (1 - a) * z2)))
        if first is None or second is None or mixed is None:
            continue
        rhs = max(first, second)
        rows.append((mixed - rhs, {'index': draw.index, 'alpha': a}, mixed, rhs))
    return rows


def _level_rows(fam: LogRiskAcceptanceFamily, config: SamplerConfig) -> Tuple[List[Row], List[Row]]:
    """Grid checks: acceptance grows with b, and holds at b when it holds just above b"""
    increasing, right = [], []
    levels = fam.levels
    step = 2.0 ** -40
    for draw in draw_samples(fam.space, config, property_key(RETURN, 'normalized_one')):
        x = Position(fam.space, np.exp(draw.z1))
        accepted = [fam.contains(b, x) for b in levels]
        drops = [float(levels[i]) for i in range(levels.size - 1) if accepted[i] and not accepted[i + 1]]
        increasing.append(_flag_row(bool(drops), {'index': draw.index, 'levels': drops}))
        for i, b in enumerate(levels):
            above = fam.contains(b * (1.0 + step), x)
            right.append(_flag_row(above and not accepted[i], {'index': draw.index, 'level': float(b)}))
    return increasing, right


def check_family_axioms(fam: LogRiskAcceptanceFamily, config: Optional[SamplerConfig] = None,
                        axioms: Optional[Tuple[str, ...]] = None) -> PropertyReport:
    """
    Sampled verdicts for the acceptance-family axioms

    Args:
        fam: family under test
        config: sampler parameters (defaults from settings)
        axioms: subset of FAMILY_AXIOMS, all by default

    Returns:
        PropertyReport: one result per axiom
    """
    config = config or SamplerConfig()
    axioms = axioms or FAMILY_AXIOMS
    unknown = [a for a in axioms if a not in FAMILY_AXIOMS]
    if unknown:
        raise InvalidInputError(f"unknown axioms {unknown}, expected some of {FAMILY_AXIOMS}")

    report = PropertyReport()
    tol, confirm = config.tolerance, config.confirm_margin
    if 'increasing_in_level' in axioms or 'right_continuous' in axioms:
        increasing, right = _level_rows(fam, config)
        if 'increasing_in_level' in axioms:
            report.add(grid_result('increasing_in_level', increasing, tol, confirm))
        if 'right_continuous' in axioms:
            report.add(grid_result('right_continuous', right, tol, confirm))
    if 'monotone' in axioms:
        report.add(grid_result('monotone', _monotone_rows(fam, config), tol, confirm))
    if 'logconvex' in axioms:
        report.add(grid_result('logconvex', _logconvex_rows(fam, config), tol, confirm))
    if 'star_shaped' in axioms:
        report.add(check_B_star_shaped(fam, config))
    if 'positively_homogeneous' in axioms:
        report.add(check_B_positively_homogeneous(fam, config))

    for name, result in report.results.items():
        status = "✓" if result.holds else "✗"
        logger.info(f"{status} {name}: max margin {result.max_margin:.3g} over {result.samples} rows")
    return report


def check_monetary_correspondence(rho: RiskFunctional, a_values, config: Optional[SamplerConfig] = None) -> PropertyResult:
    """Y in A^a exactly when e^Y is in B^(e^a), with B built from exp(rho(log .))"""
    if rho.side != MONETARY:
        raise InvalidInputError("check_monetary_correspondence expects a monetary functional")
    config = config or SamplerConfig()
    fam = family_from_measure(to_return(rho))
    rows = []
    for draw in draw_samples(rho.space, config, property_key(MONETARY, 'normalized_zero')):
        y = Position(rho.space, draw.z1)
        for a in a_values:
            monetary = in_monetary_acceptance(rho, float(a), y)
            geometric = fam.contains(math.exp(a), y.exp())
            rows.append(_flag_row(monetary != geometric, {'index': draw.index, 'a': float(a)}))
    return grid_result('acceptance_correspondence', rows, config.tolerance, config.confirm_margin)
