"""
Taxonomy classification of risk functionals.

Raw inequality verdicts come from the sampled checkers. Known implications
between them are enforced afterwards: when a premise holds and its
conclusion fails, the conclusion is re-run with four times the samples, and
if it still fails the premise is demoted.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from georisk.correspondence.checkers import (
    BRIDGES,
    PROPERTIES,
    PropertyReport,
    PropertyResult,
    SamplerConfig,
    check_properties,
    check_property,
)
from georisk.correspondence.functional import MONETARY, RETURN, RiskFunctional
from georisk.errors import InvalidInputError

logger = logging.getLogger(__name__)

FLAGS = (
    'monetary',
    'return',
    'coherent',
    'convex',
    'logconvex',
    'quasi_convex',
    'quasi_logconvex',
    'star_shaped',
    'cash_subadditive',
    'cash_superadditive',
    'constant_multiplicative',
    'submultiplicative',
    'law_invariant',
)

RERUN_FACTOR = 4

# (premises, conclusion, premise demoted on a confirmed conflict)
_IMPLICATIONS = (
    (('convex',), 'quasi_convex', 'convex'),
    (('logconvex',), 'quasi_logconvex', 'logconvex'),
    (('monotone', 'quasi_convex'), 'quasi_logconvex', 'quasi_convex'),
    (('positively_homogeneous',), 'star_shaped', 'positively_homogeneous'),
    (('translation_invariant',), 'cash_subadditive', 'translation_invariant'),
    (('translation_invariant',), 'cash_superadditive', 'translation_invariant'),
)

_MONETARY_IMPLICATIONS = (
    (('convex', 'normalized_zero'), 'star_shaped', 'convex'),
)


@dataclass
class TaxonomyClass:
    flags: Dict[str, bool]
    report: PropertyReport
    repairs: List[Dict[str, str]] = field(default_factory=list)

    def __getitem__(self, flag: str) -> bool:
        return self.flags[flag]

    def to_dict(self) -> Dict:
        return {
            'flags': dict(self.flags),
            'repairs': list(self.repairs),
            'report': self.report.to_dict(),
        }


def _demoted(premise: str, evidence: PropertyResult) -> PropertyResult:
    return PropertyResult(
        premise, False, evidence.samples, evidence.tolerance, evidence.max_margin, evidence.counterexample,
    )


def _enforce_closure(f: RiskFunctional, report: PropertyReport, config: SamplerConfig) -> List[Dict[str, str]]:
    rules = _IMPLICATIONS + (_MONETARY_IMPLICATIONS if f.side == MONETARY else ())
    repairs, rerun, demoted = [], set(), set()
    changed = True
    while changed:
        changed = False
        for premises, conclusion, target in rules:
            if not all(report.holds(p) for p in premises) or report.holds(conclusion):
                continue
            if conclusion not in rerun and conclusion not in demoted:
                rerun.add(conclusion)
                logger.info(f"{f.name}: {' and '.join(premises)} holds but {conclusion} fails, "
                            f"re-running {conclusion} with x{RERUN_FACTOR} samples")
                report.add(check_property(f, conclusion, config.scaled(RERUN_FACTOR)))
                if report.holds(conclusion):
                    repairs.append({'premise': target, 'conclusion': conclusion, 'action': 'conclusion_rerun_passed'})
                    changed = True
                    continue
            logger.warning(f"{f.name}: {conclusion} fails after re-run, demoting {target}")
            report.add(_demoted(target, report[conclusion]))
            demoted.add(target)
            repairs.append({'premise': target, 'conclusion': conclusion, 'action': 'premise_demoted'})
            changed = True
    return repairs


def _flags(f: RiskFunctional, report: PropertyReport) -> Dict[str, bool]:
    h = report.holds
    normalized_zero = h('normalized_zero') if f.side == MONETARY else True
    monetary = h('monotone') and h('translation_invariant') and normalized_zero
    convex = monetary and h('convex')
    return {
        'monetary': monetary,
        'return': h('monotone') and h('positively_homogeneous') and h('normalized_one'),
        'coherent': convex and h('positively_homogeneous'),
        'convex': convex,
        'logconvex': h('monotone') and h('positively_homogeneous') and h('logconvex'),
        'quasi_convex': h('monotone') and h('quasi_convex'),
        'quasi_logconvex': h('quasi_logconvex'),
        'star_shaped': h('star_shaped'),
        'cash_subadditive': h('cash_subadditive'),
        'cash_superadditive': h('cash_superadditive'),
        'constant_multiplicative': h('constant_multiplicative'),
        'submultiplicative': h('submultiplicative'),
        'law_invariant': h('law_invariant'),
    }


def classify(f: RiskFunctional, config: Optional[SamplerConfig] = None) -> TaxonomyClass:
    """
    Classify a functional into the monetary / return taxonomy

    Args:
        f: functional on either side
        config: sampler parameters

    Returns:
        TaxonomyClass: closed flags, the underlying report and any repairs made
    """
    config = config or SamplerConfig()
    logger.info(f"Classifying {f.name} ({f.side}) with {config.n_samples} samples, seed {config.seed}")
    report = check_properties(f, PROPERTIES, config)
    repairs = _enforce_closure(f, report, config)
    flags = _flags(f, report)
    logger.info(f"{f.name}: {sum(flags.values())}/{len(flags)} flags set")
    return TaxonomyClass(flags, report, repairs)


def bridge_equivalences(rho: RiskFunctional, trho: RiskFunctional,
                        config: Optional[SamplerConfig] = None) -> PropertyReport:
    """
    Verdict agreement of paired properties of rho and its return counterpart

    Each entry 'p<->q' holds when the verdict of p on rho equals the verdict of q on trho.
    """
    if rho.side != MONETARY or trho.side != RETURN:
        raise InvalidInputError("bridge_equivalences expects (monetary, return) functionals")
    config = config or SamplerConfig()
    out = PropertyReport()
    for left, right in BRIDGES:
        a = check_property(rho, left, config)
        b = check_property(trho, right, config)
        name = f"{left}<->{right}"
        agree = a.holds == b.holds
        gap = abs(a.max_margin - b.max_margin) if np.isfinite(a.max_margin) and np.isfinite(b.max_margin) else 0.0
        out.values[f"{name}.monetary_margin"] = a.max_margin
        out.values[f"{name}.return_margin"] = b.max_margin
        if agree:
            out.add(PropertyResult(name, True, min(a.samples, b.samples), config.tolerance, gap))
        else:
            evidence = a.counterexample or b.counterexample
            logger.warning(f"Bridge {name} disagrees: {left}={a.holds}, {right}={b.holds}")
            out.add(PropertyResult(name, False, min(a.samples, b.samples), config.tolerance, gap, evidence))
    return out


def fit_ph_kink(t, values) -> Tuple[float, float, float]:
    """
    Least-squares fit of values ~ D+ * t^+ - D- * t^-

    Returns:
        (D+, D-, max absolute residual)
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.shape != values.shape or t.size < 2:
        raise InvalidInputError("fit_ph_kink needs matching grids with at least two points")
    design = np.column_stack([np.maximum(t, 0.0), -np.maximum(-t, 0.0)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = float(np.max(np.abs(design @ coef - values)))
    return float(coef[0]), float(coef[1]), residual
