"""k-solutions, polygamy powers and the definition checks built on them.

A *value tuple* is ``(q_joint, q_parts)``: the measure across the
one-to-group cut and the measures on the pieces that cut is compared to
(pair reduced states, or the other one-to-group cuts). Everything here
works on such tuples; helpers at the bottom produce them from states.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assistance import OptimizerConfig, assistance_value
from .measures import MeasureSpec, measure_eval
from .qcore import Bipartition, PureState, RngSeed, reduced_state

TOL = 1e-9
BRACKET = (2.0 ** -20, 2.0 ** 6)
BRACKET_CEILING = 2.0 ** 12
RESIDUAL_TOL = 1e-10


class KKind(str, enum.Enum):
    FINITE = "Finite"
    ZERO = "Zero"
    ANY_NONNEGATIVE = "AnyNonnegative"
    NO_FINITE_SOLUTION = "NoFiniteSolution"


@dataclass(frozen=True)
class KSolution:
    """Solution of ``k (J^mu - max P^mu) = min P^mu`` for one value tuple.

    ``value`` is the solved ``k`` for ``Finite``, ``0`` for ``Zero`` and the
    canonical representative ``0`` for ``AnyNonnegative``; it is ``nan``
    when no ``k >= 0`` solves the equation.
    """

    kind: KKind
    value: float
    mu: float

    @property
    def is_finite(self) -> bool:
        return self.kind is KKind.FINITE


class PowerFlag:
    """Non-numeric outcome of :func:`polygamy_power_state`."""

    def __init__(self, name: str, value: float):
        self.name = name
        self.value = value

    def __repr__(self):
        return self.name

    __str__ = __repr__

    def __float__(self):
        return self.value

    def __reduce__(self):
        return (_power_flag, (self.name,))


def _power_flag(name):
    return {"Unbounded": UNBOUNDED, "NoFiniteSolution": NO_POWER}[name]


# every beta works: the joint value does not exceed the largest part
UNBOUNDED = PowerFlag("Unbounded", math.inf)
# joint > 0 but fewer than two parts are nonzero; only beta -> 0 would work
NO_POWER = PowerFlag("NoFiniteSolution", 0.0)


def is_finite_power(power) -> bool:
    return not isinstance(power, PowerFlag)


@dataclass(frozen=True)
class Def1Verdict:
    premise: bool
    consequence: bool

    @property
    def vacuous(self) -> bool:
        return not self.premise

    @property
    def witnessed(self) -> bool:
        """Polygamy holds for this tuple: premise implies consequence."""
        return (not self.premise) or self.consequence

    @property
    def violation(self) -> bool:
        return self.premise and not self.consequence


def k_solution(q_joint: float, q_parts: Sequence[float], mu: float,
               tol: float = TOL) -> KSolution:
    if not mu > 0:
        raise ValueError("mu must be positive")
    if len(q_parts) != 2:
        raise ValueError("k_solution takes exactly two part values")
    if q_joint < 0 or min(q_parts) < 0:
        raise ValueError("measure values must be nonnegative")
    powered = [p ** mu for p in q_parts]
    denominator = q_joint ** mu - max(powered)
    smallest = min(powered)
    if denominator > tol:
        if smallest > tol:
            return KSolution(KKind.FINITE, smallest / denominator, mu)
        return KSolution(KKind.ZERO, 0.0, mu)
    if smallest <= tol:
        return KSolution(KKind.ANY_NONNEGATIVE, 0.0, mu)
    return KSolution(KKind.NO_FINITE_SOLUTION, math.nan, mu)


def h_beta(q_joint: float, q_parts: Sequence[float], beta: float) -> float:
    """``q_joint**beta - sum(q_parts**beta)``; ``<= 0`` means beta-polygamous here."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return q_joint ** beta - sum(p ** beta for p in q_parts)


def _ratio_sum(log_ratios: np.ndarray, gamma: float) -> float:
    return float(np.exp(gamma * log_ratios).sum())


def polygamy_power_state(q_joint: float, q_parts: Sequence[float],
                         tol: float = TOL):
    """Crossover exponent ``gamma*`` with ``sum (y_i / x)**gamma* = 1``.

    ``q_joint**beta <= sum q_parts**beta`` holds exactly for
    ``beta <= gamma*``. Returns :data:`UNBOUNDED` when the joint value does
    not exceed the largest part (every beta works) and :data:`NO_POWER`
    when fewer than two parts are nonzero. The root is bracketed in
    ``[2**-20, 2**6]``; the upper end doubles up to ``2**12``.
    """
    if len(q_parts) < 2:
        raise ValueError("need at least two part values")
    if q_joint < 0 or min(q_parts) < 0:
        raise ValueError("measure values must be nonnegative")
    if q_joint <= tol or q_joint <= max(q_parts) + tol:
        return UNBOUNDED
    positive = np.array([p for p in q_parts if p > tol], dtype=float)
    if positive.size < 2:
        return NO_POWER
    log_ratios = np.log(positive / q_joint)
    lo, hi = BRACKET
    if _ratio_sum(log_ratios, lo) < 1:
        raise ValueError("polygamy power lies below the search bracket")
    while _ratio_sum(log_ratios, hi) > 1:
        if hi >= BRACKET_CEILING:
            raise ValueError("polygamy power exceeds 2**12")
        hi *= 2
    # the ratio sum is strictly decreasing in gamma
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _ratio_sum(log_ratios, mid) >= 1:
            lo = mid
        else:
            hi = mid
    root = lo if abs(_ratio_sum(log_ratios, lo) - 1) <= abs(
        _ratio_sum(log_ratios, hi) - 1) else hi
    residual = abs(_ratio_sum(log_ratios, root) - 1)
    if residual > RESIDUAL_TOL:
        raise ArithmeticError(f"bisection residual {residual:.3g} above 1e-10")
    return root


def def1_check(q_joint: float, q_pairs: Sequence[float],
               tol: float = TOL) -> Def1Verdict:
    """Premise ``joint > max(pairs) > 0``; consequence ``min(pairs) > 0``."""
    if len(q_pairs) == 0:
        raise ValueError("pair list is empty")
    top = max(q_pairs)
    premise = q_joint > top + tol and top > tol
    return Def1Verdict(premise, min(q_pairs) > tol)


# -- tuples from states -----------------------------------------------------

def _single(i: int, n: int) -> Bipartition:
    return Bipartition.split([i], n)


def tripartite_values(psi: PureState, spec: MeasureSpec,
                      cfg: OptimizerConfig | None = None):
    """``(Q(A|BC), Q_a(rho_AB), Q_a(rho_AC))`` for a three-qubit pure state."""
    if psi.num_qubits != 3:
        raise ValueError("tripartite values need exactly three parties")
    joint = measure_eval(spec, psi, _single(0, 3))
    cut = _single(0, 2)
    pairs = tuple(assistance_value(reduced_state(psi, [0, j]), cut, spec, cfg)
                  for j in (1, 2))
    return joint, pairs


def one_to_group_values(psi: PureState, spec: MeasureSpec):
    if psi.num_qubits != 3:
        raise ValueError("one-to-group values need exactly three parties")
    return tuple(measure_eval(spec, psi, _single(i, 3)) for i in range(3))


def theorem5_power(values: Sequence[float], tol: float = TOL):
    """Polygamy power for ``Q_A|BC`` against ``Q_B|AC`` and ``Q_C|AB``."""
    q_a, q_b, q_c = values
    return polygamy_power_state(q_a, [q_b, q_c], tol)


def def2_check(values: Sequence[float], tol: float = TOL) -> Def1Verdict:
    q_a, q_b, q_c = values
    return def1_check(q_a, [q_b, q_c], tol)


def polygon_check(psi: PureState, spec: MeasureSpec):
    """Residuals of ``Q_i <= Q_j + Q_k`` for each one-to-group cut ``i``."""
    q_a, q_b, q_c = one_to_group_values(psi, spec)
    return (q_b + q_c - q_a, q_a + q_c - q_b, q_a + q_b - q_c)


def nested_level_values(psi: PureState, spec: MeasureSpec,
                        cfg: OptimizerConfig | None = None):
    """Per-level ``(joint, (pair, group))`` along the ``A_1`` chain.

    Level ``i`` (1-based) looks at the reduced state on ``A_1 A_{i+1} .. A_n``
    and compares its ``A_1 | rest`` value with the pair ``A_1 A_{i+1}`` and the
    residual group ``A_1 | A_{i+2} .. A_n``. Pure states use the measure
    itself; mixed reduced states use the assistance value.
    """
    n = psi.num_qubits
    if n < 3:
        raise ValueError("nested K-sets need at least three parties")

    def value(keep):
        keep = sorted(keep)
        cut = Bipartition.split([0], len(keep))
        if len(keep) == n:
            return measure_eval(spec, psi, cut)
        return assistance_value(reduced_state(psi, keep), cut, spec, cfg)

    levels = []
    group = value(range(n))
    for i in range(1, n - 1):
        joint = group
        pair = value([0, i])
        group = value([0] + list(range(i + 1, n)))
        levels.append((joint, (pair, group)))
    return levels


def nested_k_sets(psi: PureState, spec: MeasureSpec, mu: float,
                  cfg: OptimizerConfig | None = None,
                  tol: float = TOL) -> list[KSolution]:
    return [k_solution(joint, parts, mu, tol)
            for joint, parts in nested_level_values(psi, spec, cfg)]


def nested_lower_bound(per_state: Sequence[Sequence[KSolution]]):
    """Per-level infimum of finite k values and their maximum ``M``.

    Levels with no finite value get ``nan`` and do not enter ``M``.
    """
    per_state = list(per_state)
    if not per_state:
        raise ValueError("no states given")
    levels = len(per_state[0])
    bounds = []
    for i in range(levels):
        finite = [ks[i].value for ks in per_state if ks[i].is_finite]
        bounds.append(min(finite) if finite else math.nan)
    usable = [b for b in bounds if not math.isnan(b)]
    return bounds, (max(usable) if usable else math.nan)


def ensemble_lower_bound(sampler, spec: MeasureSpec, mu: float, count: int,
                         rng: RngSeed, cfg: OptimizerConfig | None = None):
    """Running minimum of finite k over ``count`` sampled states.

    ``sampler`` is a :class:`~entassist.families.FamilySpec` (or the text
    form accepted by ``FamilySpec.parse``). Sample ``i`` is drawn from
    ``rng.generator(i)``. ``AnyNonnegative`` samples impose no constraint and
    are skipped. Returns ``(inf_k, descriptor of the minimizing sample)``.
    """
    from . import families

    if count < 1:
        raise ValueError("count must be at least 1")
    family = families.FamilySpec.parse(sampler) if isinstance(sampler, str) \
        else sampler
    best, arg = math.inf, None
    for i in range(count):
        desc, joint, parts = families.sample_values(
            family, spec, rng.generator(i), cfg)
        k = k_solution(joint, parts, mu)
        if k.is_finite and k.value < best:
            best, arg = k.value, desc
    if arg is None:
        raise ValueError("every sample was degenerate; no finite k found")
    return best, arg
