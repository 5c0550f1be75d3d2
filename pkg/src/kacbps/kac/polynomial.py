"""Kac polynomials as integer polynomials in q, plus exact interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import ConsistencyError
from ..quiver import DimVector, Quiver, euler_form
from ..series import HalfLaurent


@dataclass(frozen=True)
class KacPolynomial:
    quiver: Quiver
    d: DimVector
    polynomial: HalfLaurent

    def __post_init__(self):
        for e, c in self.polynomial.items():
            if e < 0 or e % 2 or c.denominator != 1:
                raise ConsistencyError(f"Kac polynomial term {c}*q^({e}/2) is not an integer monomial")

    @classmethod
    def from_coefficients(cls, quiver: Quiver, d: Sequence[int], coeffs: Sequence[int]) -> "KacPolynomial":
        return cls(quiver, quiver.dim(d), HalfLaurent.from_poly(coeffs, step=2))

    @property
    def coefficients(self) -> list[int]:
        """Coefficients from the constant term upward."""
        top = self.degree
        return [int(self.polynomial.coeff(2 * k)) for k in range(top + 1)] if top >= 0 else []

    @property
    def degree(self) -> int:
        m = self.polynomial.max_exp()
        return -1 if m is None else m // 2

    def __call__(self, q) -> int | Fraction:
        value = self.polynomial.evaluate(q)
        return int(value) if value.denominator == 1 else value

    def constant_term(self) -> int:
        return int(self.polynomial.coeff(0))

    def degree_bound(self) -> int:
        return 1 - euler_form(self.quiver, self.d, self.d)

    def render(self) -> str:
        return self.polynomial.render(compact=True, descending=True)

    def __str__(self):
        return self.render()

    def to_json(self) -> dict:
        return {"d": list(self.d), "coefficients": self.coefficients, "rendered": self.render()}

    def __eq__(self, other):
        if not isinstance(other, KacPolynomial):
            return NotImplemented
        return self.d == other.d and self.polynomial == other.polynomial

    def __hash__(self):
        return hash((self.d, self.polynomial))


def lagrange_coefficients(xs: Sequence[int], ys: Sequence) -> list[Fraction]:
    """Coefficients (constant first) of the unique polynomial through the points."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xs[j] * basis[k + 1]
            denom *= xs[i] - xs[j]
        scale = Fraction(ys[i]) / denom
        for k in range(n):
            coeffs[k] += scale * basis[k]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def evaluate(coeffs: Sequence, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc
