"""
Law-invariant dual representations on equiprobable atoms.

    rho~(X) = sup_Q exp(R(int_0^1 log q_X(b) q_{dQ/dP}(b) db; Q))

and the AR@R mixture form of the comonotone integral, where the mixing
measure on [0,1) is read off the jumps of the sorted density.
"""

import math
import logging
from typing import Tuple

import numpy as np

from georisk.correspondence.functional import safe_exp
from georisk.duality.dual_measure import DualMeasure
from georisk.errors import ConsistencyError, InvalidInputError
from georisk.measures.zoo import avar
from georisk.prob_core import Position, Scenario, check_same_space, comonotone_integral

logger = logging.getLogger(__name__)

MASS_TOL = 1e-10
MIXTURE_TOL = 1e-9


def _require_law_invariant(m: DualMeasure):
    m.space.require_equiprobable()
    if not m.r.is_law_invariant(m.qs):
        raise InvalidInputError(f"R family '{m.r.family}' is not law invariant over this scenario set")


def law_invariant_dual_eval(m: DualMeasure, x: Position) -> float:
    """sup over scenarios of exp(R(comonotone integral of log X and dQ/dP; Q))"""
    check_same_space(x, m.qs)
    _require_law_invariant(m)
    logs = x.log()
    return max(safe_exp(m.r.value(comonotone_integral(logs, q), k)) for k, q in enumerate(m.qs))


def law_equivalent_dual_sup(m: DualMeasure, x: Position) -> float:
    """Brute force: dual evaluation over every density permutation of every scenario"""
    check_same_space(x, m.qs)
    _require_law_invariant(m)
    closed, origins = m.qs.permutation_closure()
    logs = np.log(x.values)
    return max(
        safe_exp(m.r.value(math.fsum(q.weights * logs), k))
        for q, k in zip(closed, origins)
    )


def arar_mixing_measure(q: Scenario) -> Tuple[np.ndarray, np.ndarray]:
    """
    Discrete mixing measure m_Q on [0,1) with int log AR@R_a(X) m_Q(da) = comonotone integral

    Mass d_(1) sits at 0 and (1 - k/n)(d_(k+1) - d_(k)) at k/n, where d_(k) are the
    densities sorted ascending.

    Returns:
        (levels, masses)

    Raises:
        ConsistencyError: masses do not sum to one within 1e-10
    """
    q.space.require_equiprobable()
    d = np.sort(q.density)
    n = d.size
    k = np.arange(1, n)
    levels = np.concatenate(([0.0], k / n))
    masses = np.concatenate(([d[0]], (1.0 - k / n) * np.diff(d)))
    total = math.fsum(masses)
    if abs(total - 1.0) > MASS_TOL:
        raise ConsistencyError(f"AR@R mixing measure has total mass {total!r}")
    keep = masses > 0
    return levels[keep], masses[keep]


def arar_mixture_integral(x: Position, q: Scenario) -> float:
    """
    sum_a m_Q(a) * log AR@R_a(X), cross-checked against the comonotone integral

    Raises:
        ConsistencyError: the two routes differ by more than 1e-9
    """
    check_same_space(x, q)
    levels, masses = arar_mixing_measure(q)
    logs = x.log()
    mixture = math.fsum(m * avar(logs, float(a)) for a, m in zip(levels, masses))
    direct = comonotone_integral(logs, q)
    if abs(mixture - direct) > MIXTURE_TOL:
        raise ConsistencyError(f"AR@R mixture {mixture!r} differs from the comonotone integral {direct!r}")
    return mixture


def arar_mixture_eval(m: DualMeasure, x: Position) -> float:
    """Law-invariant dual value with each comonotone integral taken through the AR@R mixture"""
    check_same_space(x, m.qs)
    _require_law_invariant(m)
    return max(safe_exp(m.r.value(arar_mixture_integral(x, q), k)) for k, q in enumerate(m.qs))
