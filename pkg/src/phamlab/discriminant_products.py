"""Log-magnitude products over tuples of critical values.

Three product families measure the bifurcation sets along a deformation ray:
ordered pair differences v_i - v_j (caustic + Maxwell), distinguished-point
triples 2*v_1 - v_2 - v_3 (mixed Stokes), and ordered pairs of disjoint
unordered pairs v_1 + v_2 - v_3 - v_4 (pure Stokes).  A fourth product of
Hessian determinants isolates the caustic share.

Products are accumulated as sums of log-magnitudes; raw products underflow
immediately (756 factors of size |eps|^(4/3) at mu = 9).  Factors below the
roundoff scale are recorded as exact zeros instead of being folded into the
total, so a structurally degenerate line is detected rather than averaged
away.  Tuple enumeration is lexicographic and fixed, which keeps traces
byte-for-byte reproducible.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .closed_forms import binom12, binom22
from .critical_tracker import CriticalPointSet, GenericLine, critical_set, line_function
from .polyalg import SparsePoly, hessian_det_at

__all__ = [
    "Kind",
    "FactorRecord",
    "LogProduct",
    "LogProductTrace",
    "factor_count",
    "log_D",
    "log_Y",
    "log_Omega",
    "log_hessian_product",
    "products_at",
    "evaluate_trace",
]

# |factor| below 1e3 * machine-epsilon * scale counts as a structural zero
ZERO_COEF = 1e3 * sys.float_info.epsilon


class Kind(str, Enum):
    D_PAIR = "D_pair"
    Y_TRIPLE = "Y_triple"
    OMEGA_QUAD = "Omega_quad"
    HESSIAN = "Hessian"


@dataclass(frozen=True)
class FactorRecord:
    """One multiplicand: its tuple of point labels and log|factor|.

    log_magnitude is None exactly when the factor fell below the zero
    threshold.
    """

    kind: Kind
    indices: tuple
    log_magnitude: Optional[float]

    @property
    def is_zero(self) -> bool:
        return self.log_magnitude is None


@dataclass(frozen=True)
class LogProduct:
    """Total log-magnitude of one product plus its factor records."""

    kind: Kind
    total: float  # sum over non-zero factors
    factors: tuple[FactorRecord, ...]

    @property
    def zero_count(self) -> int:
        return sum(1 for f in self.factors if f.is_zero)

    @property
    def has_zero(self) -> bool:
        return any(f.is_zero for f in self.factors)


def factor_count(kind: Kind, mu: int) -> int:
    if kind is Kind.D_PAIR:
        return mu * (mu - 1)
    if kind is Kind.Y_TRIPLE:
        return binom12(mu)
    if kind is Kind.OMEGA_QUAD:
        return binom22(mu)
    return mu


def _default_labels(values: Sequence[complex]) -> list:
    return list(range(len(values)))


def _zero_threshold(values: Sequence[complex]) -> float:
    scale = max((abs(v) for v in values), default=0.0)
    return ZERO_COEF * scale


def _record(kind: Kind, indices: tuple, factor: complex, threshold: float) -> FactorRecord:
    magnitude = abs(factor)
    if magnitude <= threshold:
        return FactorRecord(kind, indices, None)
    return FactorRecord(kind, indices, math.log(magnitude))


def _assemble(kind: Kind, records: list[FactorRecord]) -> LogProduct:
    total = sum(r.log_magnitude for r in records if r.log_magnitude is not None)
    return LogProduct(kind, float(total), tuple(records))


def log_D(values: Sequence[complex], labels: Optional[Sequence] = None) -> LogProduct:
    """Product over ordered pairs i != j of v_i - v_j."""
    labels = list(labels) if labels is not None else _default_labels(values)
    threshold = _zero_threshold(values)
    records = []
    for i in range(len(values)):
        for j in range(len(values)):
            if i != j:
                records.append(
                    _record(Kind.D_PAIR, (labels[i], labels[j]), values[i] - values[j], threshold)
                )
    return _assemble(Kind.D_PAIR, records)


def log_Y(values: Sequence[complex], labels: Optional[Sequence] = None) -> LogProduct:
    """Product over distinguished-point triples of 2*v_1 - v_2 - v_3.

    The first point is distinguished, the remaining two are unordered.
    """
    labels = list(labels) if labels is not None else _default_labels(values)
    threshold = _zero_threshold(values)
    records = []
    mu = len(values)
    for i in range(mu):
        others = [k for k in range(mu) if k != i]
        for j, k in itertools.combinations(others, 2):
            factor = 2 * values[i] - values[j] - values[k]
            records.append(
                _record(Kind.Y_TRIPLE, (labels[i], labels[j], labels[k]), factor, threshold)
            )
    return _assemble(Kind.Y_TRIPLE, records)


def log_Omega(values: Sequence[complex], labels: Optional[Sequence] = None) -> LogProduct:
    """Product over ordered pairs of disjoint unordered pairs of v1+v2-v3-v4."""
    labels = list(labels) if labels is not None else _default_labels(values)
    threshold = _zero_threshold(values)
    records = []
    pairs = list(itertools.combinations(range(len(values)), 2))
    # each unordered configuration is computed once and emitted in both pair
    # orders as exact negations, so reversing the order flips only the sign
    forward: dict[tuple, complex] = {}
    for p1 in pairs:
        for p2 in pairs:
            if p1 == p2 or set(p1) & set(p2):
                continue
            if p1 < p2:
                factor = values[p1[0]] + values[p1[1]] - values[p2[0]] - values[p2[1]]
                forward[(p1, p2)] = factor
            else:
                factor = -forward[(p2, p1)]
            indices = (labels[p1[0]], labels[p1[1]], labels[p2[0]], labels[p2[1]])
            records.append(_record(Kind.OMEGA_QUAD, indices, factor, threshold))
    return _assemble(Kind.OMEGA_QUAD, records)


def log_hessian_product(f_eps: SparsePoly, points: CriticalPointSet) -> LogProduct:
    """Product over the critical points of |det Hess(f - eps*phi)|."""
    dets = [hessian_det_at(f_eps, p.coords) for p in points.points]
    threshold = _zero_threshold(dets)
    records = [
        _record(Kind.HESSIAN, (p.label,), det, threshold)
        for p, det in zip(points.points, dets)
    ]
    return _assemble(Kind.HESSIAN, records)


def products_at(
    line: GenericLine,
    eps: complex,
    kinds: Sequence[Kind],
    steps: int = 32,
    points: Optional[CriticalPointSet] = None,
) -> dict[Kind, LogProduct]:
    """Evaluate the requested products at one ray parameter."""
    if points is None:
        points = critical_set(line, eps, steps)
    values = points.values()
    labels = points.labels()
    out: dict[Kind, LogProduct] = {}
    for kind in kinds:
        if kind is Kind.D_PAIR:
            out[kind] = log_D(values, labels)
        elif kind is Kind.Y_TRIPLE:
            out[kind] = log_Y(values, labels)
        elif kind is Kind.OMEGA_QUAD:
            out[kind] = log_Omega(values, labels)
        elif kind is Kind.HESSIAN:
            out[kind] = log_hessian_product(line_function(line, eps), points)
        else:
            raise ValueError(f"unknown product kind {kind}")
        expected = factor_count(kind, line.a.mu)
        if len(out[kind].factors) != expected:
            raise AssertionError(
                f"{kind.value}: {len(out[kind].factors)} factors, expected {expected}"
            )
    return out


@dataclass(frozen=True)
class LogProductTrace:
    """Per-sample product logs along a ray, factor-aligned across samples."""

    epsilon_samples: tuple[complex, ...]
    samples: tuple[dict, ...]  # one {Kind: LogProduct} per epsilon
    counts: dict

    def kinds(self) -> list[Kind]:
        return list(self.samples[0].keys()) if self.samples else []

    def totals(self, kind: Kind) -> list[float]:
        return [s[kind].total for s in self.samples]

    def has_zero(self, kind: Kind) -> bool:
        return any(s[kind].has_zero for s in self.samples)

    def first_zero(self, kind: Kind) -> Optional[FactorRecord]:
        for s in self.samples:
            for record in s[kind].factors:
                if record.is_zero:
                    return record
        return None


def evaluate_trace(
    line: GenericLine,
    eps_samples: Sequence[complex],
    kinds: Sequence[Kind],
    steps: int = 32,
) -> LogProductTrace:
    kinds = list(kinds)
    samples = []
    for eps in eps_samples:
        samples.append(products_at(line, eps, kinds, steps))
    counts = {kind: factor_count(kind, line.a.mu) for kind in kinds}
    return LogProductTrace(tuple(eps_samples), tuple(samples), counts)
