"""Sparse multivariate polynomials over complex coefficients.

The numeric substrate for the deformation pipeline: term-map polynomials with
formal differentiation, batch evaluation, Hessian determinants, and a
simultaneous-iteration univariate root finder.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .closed_forms import ExponentVector

__all__ = [
    "SparsePoly",
    "PhamFunction",
    "NonConvergence",
    "evaluate",
    "gradient",
    "hessian_det_at",
    "univariate_roots",
]

Exponent = tuple[int, ...]


class NonConvergence(Exception):
    """Root iteration failed to meet the residual bound; carries the worst residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SparsePoly:
    """Polynomial as a map from exponent multi-indices to complex coefficients.

    Zero coefficients are never stored.  When ``versal_box`` is given the
    exponents are confined to 0 <= alpha_i <= a_i - 1 with no constant term,
    the admissible shape for deformation directions; intermediate results
    (gradients, products) are built without the box.
    """

    __slots__ = ("n_vars", "terms")

    def __init__(
        self,
        n_vars: int,
        terms: Optional[Mapping[Exponent, complex]] = None,
        versal_box: Optional[ExponentVector] = None,
    ):
        if n_vars < 1:
            raise ValueError("n_vars must be >= 1")
        self.n_vars = int(n_vars)
        cleaned: dict[Exponent, complex] = {}
        for exp, coef in (terms or {}).items():
            key = tuple(int(e) for e in exp)
            if len(key) != self.n_vars:
                raise ValueError(f"exponent {key} has wrong length for {self.n_vars} variables")
            if any(e < 0 for e in key):
                raise ValueError(f"negative exponent in {key}")
            value = complex(coef)
            if value != 0:
                cleaned[key] = cleaned.get(key, 0j) + value
        self.terms = {k: v for k, v in cleaned.items() if v != 0}
        if versal_box is not None:
            box = versal_box.a
            if len(box) != self.n_vars:
                raise ValueError("versal box arity mismatch")
            for exp in self.terms:
                if all(e == 0 for e in exp):
                    raise ValueError("constant term not allowed inside the versal box")
                if any(e > box[i] - 1 for i, e in enumerate(exp)):
                    raise ValueError(f"exponent {exp} outside the versal box {box}")

    @classmethod
    def zero(cls, n_vars: int) -> "SparsePoly":
        return cls(n_vars, {})

    @classmethod
    def monomial(cls, n_vars: int, exp: Exponent, coef: complex = 1.0) -> "SparsePoly":
        return cls(n_vars, {tuple(exp): coef})

    @classmethod
    def linear(cls, coeffs: Sequence[complex]) -> "SparsePoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exp = [0] * n
            exp[i] = 1
            terms[tuple(exp)] = c
        return cls(n, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePoly)
            and self.n_vars == other.n_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{c!r}*z^{e}" for e, c in sorted(self.terms.items())) or "0"
        return f"SparsePoly({self.n_vars}, {body})"

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        if self.n_vars != other.n_vars:
            raise ValueError("variable-count mismatch")
        merged = dict(self.terms)
        for exp, coef in other.terms.items():
            merged[exp] = merged.get(exp, 0j) + coef
        return SparsePoly(self.n_vars, merged)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            if self.n_vars != other.n_vars:
                raise ValueError("variable-count mismatch")
            out: dict[Exponent, complex] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = tuple(x + y for x, y in zip(e1, e2))
                    out[key] = out.get(key, 0j) + c1 * c2
            return SparsePoly(self.n_vars, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor: complex) -> "SparsePoly":
        return SparsePoly(self.n_vars, {e: c * complex(factor) for e, c in self.terms.items()})

    def diff(self, var: int) -> "SparsePoly":
        out: dict[Exponent, complex] = {}
        for exp, coef in self.terms.items():
            e = exp[var]
            if e:
                key = exp[:var] + (e - 1,) + exp[var + 1:]
                out[key] = out.get(key, 0j) + coef * e
        return SparsePoly(self.n_vars, out)

    def support(self) -> set[int]:
        """Indices of variables that actually occur."""
        return {i for exp in self.terms for i, e in enumerate(exp) if e}

    def evaluate(self, z: Sequence[complex]) -> complex:
        if len(z) != self.n_vars:
            raise ValueError(f"point has {len(z)} coordinates, polynomial has {self.n_vars}")
        total = 0j
        for exp, coef in sorted(self.terms.items()):
            term = coef
            for zi, e in zip(z, exp):
                if e:
                    term *= zi**e
            total += term
        return total

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an (m, n_vars) array of complex points."""
        points = np.asarray(points, dtype=complex)
        if points.ndim != 2 or points.shape[1] != self.n_vars:
            raise ValueError("expected an (m, n_vars) array")
        out = np.zeros(points.shape[0], dtype=complex)
        for exp, coef in sorted(self.terms.items()):
            term = np.full(points.shape[0], coef, dtype=complex)
            for i, e in enumerate(exp):
                if e:
                    term = term * points[:, i] ** e
            out += term
        return out

    def to_json_dict(self) -> dict:
        return {
            "vars": self.n_vars,
            "terms": [
                {"exp": list(exp), "re": coef.real, "im": coef.imag}
                for exp, coef in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "SparsePoly":
        try:
            n = int(data["vars"])
            terms = {
                tuple(int(e) for e in item["exp"]): complex(float(item["re"]), float(item.get("im", 0.0)))
                for item in data["terms"]
            }
        except (KeyError, TypeError) as err:
            raise ValueError(f"malformed polynomial literal: {err}") from err
        return cls(n, terms)


@dataclass(frozen=True)
class PhamFunction:
    """f = sum_i z_i^(a_i+1), optionally with the 1/(a_i+1) normalization.

    Normalized, the i-th partial derivative is exactly z_i^(a_i): the
    derivative is produced symbolically with unit coefficient rather than by
    multiplying 1/(a_i+1) back, so no rounding enters.
    """

    a: ExponentVector
    normalized: bool = True

    def to_sparse(self) -> SparsePoly:
        n = self.a.n
        terms = {}
        for i, ai in enumerate(self.a):
            exp = [0] * n
            exp[i] = ai + 1
            terms[tuple(exp)] = 1.0 / (ai + 1) if self.normalized else 1.0
        return SparsePoly(n, terms)

    def gradient_polys(self) -> list[SparsePoly]:
        n = self.a.n
        out = []
        for i, ai in enumerate(self.a):
            exp = [0] * n
            exp[i] = ai
            coef = 1.0 if self.normalized else float(ai + 1)
            out.append(SparsePoly.monomial(n, tuple(exp), coef))
        return out


def evaluate(p: SparsePoly, z: Sequence[complex]) -> complex:
    return p.evaluate(z)


def gradient(p: SparsePoly) -> list[SparsePoly]:
    return [p.diff(i) for i in range(p.n_vars)]


def hessian_det_at(p: SparsePoly, z: Sequence[complex]) -> complex:
    """Determinant of the second-derivative matrix at z."""
    if len(z) != p.n_vars:
        raise ValueError(f"point has {len(z)} coordinates, polynomial has {p.n_vars}")
    n = p.n_vars
    firsts = [p.diff(i) for i in range(n)]
    entries = [[firsts[i].diff(j).evaluate(z) for j in range(n)] for i in range(n)]
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    return complex(np.linalg.det(np.array(entries, dtype=complex)))


def _horner_pair(coeffs: Sequence[complex], z: complex) -> tuple[complex, complex]:
    """Value and derivative of sum_k coeffs[k] z^k."""
    value = coeffs[-1]
    deriv = 0j
    for c in reversed(coeffs[:-1]):
        deriv = deriv * z + value
        value = value * z + c
    return value, deriv


def univariate_roots(coeffs: Sequence[complex], max_sweeps: int = 200) -> list[complex]:
    """All roots (with multiplicity) of sum_k coeffs[k] z^k, ascending order.

    Simultaneous iteration with mutual-repulsion corrections, followed by one
    Newton polish per root.  Each returned root r satisfies
    |p(r)| <= 1e-12 * max|coeff| * max(1, |r|)^degree; otherwise
    NonConvergence is raised with the worst residual.
    """
    c = [complex(x) for x in coeffs]
    if len(c) < 2:
        raise ValueError("degree must be >= 1")
    if c[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    degree = len(c) - 1
    if degree == 1:
        return [-c[0] / c[1]]

    lead = abs(c[-1])
    cauchy = 1.0 + max(abs(x) for x in c[:-1]) / lead
    radius = (abs(c[0]) / lead) ** (1.0 / degree) if c[0] != 0 else 0.0
    radius = min(max(radius, 1e-6 * cauchy), cauchy)
    # deterministic non-symmetric starting angles
    z = [radius * cmath.exp(2j * math.pi * (k + 0.37) / degree) for k in range(degree)]

    for _ in range(max_sweeps):
        moved = 0.0
        for k in range(degree):
            pk, dpk = _horner_pair(c, z[k])
            if pk == 0:
                continue
            w = pk / dpk if dpk != 0 else pk
            repulsion = 0j
            for j in range(degree):
                if j != k:
                    gap = z[k] - z[j]
                    if gap == 0:
                        gap = 1e-30
                    repulsion += 1.0 / gap
            denom = 1.0 - w * repulsion
            delta = w if denom == 0 else w / denom
            z[k] -= delta
            moved = max(moved, abs(delta) / (1.0 + abs(z[k])))
        if moved < 5e-15:
            break

    # one Newton step as cheap polish for cluster-distance work downstream
    for k in range(degree):
        pk, dpk = _horner_pair(c, z[k])
        if dpk != 0:
            step = pk / dpk
            if abs(step) < 1e-3 * (1.0 + abs(z[k])):
                z[k] -= step

    maxc = max(abs(x) for x in c)
    worst = 0.0
    for root in z:
        residual = abs(_horner_pair(c, root)[0])
        bound = 1e-12 * maxc * max(1.0, abs(root)) ** degree
        if residual > bound:
            worst = max(worst, residual)
    if worst > 0.0:
        raise NonConvergence("root iteration did not meet the residual bound", worst)
    return z
