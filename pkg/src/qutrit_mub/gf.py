"""Arithmetic in the qutrit fields GF(3), GF(9) and GF(27).

Elements are stored as coefficient triples ``(c0, c1, c2)`` of
``1, a, a^2`` over GF(3), where ``a`` is a root of the field's modulus
polynomial.  Multiplication is polynomial multiplication followed by
reduction modulo that polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

P = 3


class FieldError(ValueError):
    """Raised for invalid field specs or operands from different fields."""


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, int, int]
    field_order: int

    def __post_init__(self):
        if self.field_order not in (3, 9, 27):
            raise FieldError(f"unsupported field order {self.field_order}")
        if len(self.coeffs) != 3 or any(c not in (0, 1, 2) for c in self.coeffs):
            raise FieldError(f"coefficients must be a triple over {{0,1,2}}: {self.coeffs}")
        n = degree_of(self.field_order)
        if any(self.coeffs[n:]):
            raise FieldError(f"{self.coeffs} has terms above degree {n - 1} for GF({self.field_order})")

    def __add__(self, other: FieldElement) -> FieldElement:
        return add(self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return add(self, -other)

    def __neg__(self) -> FieldElement:
        return FieldElement(tuple((-c) % P for c in self.coeffs), self.field_order)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return mul(self, other)

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            return inverse(self) ** (-e)
        result = FieldElement((1, 0, 0), self.field_order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        terms = []
        for power, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if power == 0:
                terms.append(str(c))
            else:
                mono = "a" if power == 1 else f"a^{power}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) if terms else "0"


def degree_of(order: int) -> int:
    return {3: 1, 9: 2, 27: 3}[order]


def _poly_has_root(poly: tuple[int, ...]) -> bool:
    return any(sum(c * x**i for i, c in enumerate(poly)) % P == 0 for x in range(P))


def _is_irreducible(poly: tuple[int, ...]) -> bool:
    # Degree <= 3 over a field: irreducible iff no linear factor, i.e. no root.
    n = len(poly) - 1
    if n == 1:
        return poly[1] % P != 0
    return poly[-1] % P != 0 and not _poly_has_root(poly)


@dataclass(frozen=True)
class FieldSpec:
    """A concrete GF(3^n) with its modulus and the index <-> element labelling.

    ``modulus`` lists coefficients lowest degree first and is monic.
    ``enumeration`` fixes which element sits at each basis/vector/component
    index; zero is always first.
    """

    order: int
    modulus: tuple[int, ...]
    enumeration: tuple[FieldElement, ...] = field(repr=False)

    def __post_init__(self):
        if self.order not in (3, 9, 27):
            raise FieldError(f"unsupported field order {self.order}")
        n = degree_of(self.order)
        if len(self.modulus) != n + 1 or self.modulus[-1] != 1:
            raise FieldError(f"modulus {self.modulus} must be monic of degree {n}")
        if not _is_irreducible(self.modulus):
            raise FieldError(f"modulus {self.modulus} is reducible over GF(3)")
        if len(self.enumeration) != self.order or len(set(self.enumeration)) != self.order:
            raise FieldError("enumeration must list every field element exactly once")
        if any(e.field_order != self.order for e in self.enumeration):
            raise FieldError("enumeration contains elements of another field")
        if not self.enumeration[0].is_zero():
            raise FieldError("enumeration must start with zero")

    @property
    def degree(self) -> int:
        return degree_of(self.order)

    def index(self, element: FieldElement) -> int:
        return _index_map(self)[element]

    def element(self, i: int) -> FieldElement:
        return self.enumeration[i]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "modulus": list(self.modulus),
            "enumeration": [list(e.coeffs[: self.degree]) for e in self.enumeration],
        }

    @classmethod
    def from_dict(cls, data: dict) -> FieldSpec:
        order = int(data["order"])
        n = degree_of(order)
        elems = tuple(
            FieldElement(tuple(list(c) + [0] * (3 - n)), order) for c in data["enumeration"]
        )
        return cls(order, tuple(data["modulus"]), elems)


@lru_cache(maxsize=None)
def _index_map(spec: FieldSpec) -> dict[FieldElement, int]:
    return {e: i for i, e in enumerate(spec.enumeration)}


# x + 0, x^2 + x + 2 (as printed for GF(9)), x^3 + 2x + 1
MODULI = {3: (0, 1), 9: (2, 1, 1), 27: (1, 2, 0, 1)}


def _default_enumeration(order: int) -> tuple[FieldElement, ...]:
    if order == 3:
        return tuple(FieldElement((c, 0, 0), 3) for c in range(3))
    if order == 9:
        # 0, a, 2a, 1, 1+a, 1+2a, 2, 2+a, 2+2a
        return tuple(FieldElement((c0, c1, 0), 9) for c0, c1 in product(range(3), repeat=2))
    # lexicographic on (c2, c1, c0)
    return tuple(FieldElement((c0, c1, c2), 27) for c2, c1, c0 in product(range(3), repeat=3))


@lru_cache(maxsize=None)
def field_spec(order: int) -> FieldSpec:
    """Default spec for GF(3), GF(9) or GF(27)."""
    if order not in MODULI:
        raise FieldError(f"unsupported field order {order}")
    return FieldSpec(order, MODULI[order], _default_enumeration(order))


def _check_same(a: FieldElement, b: FieldElement) -> None:
    if a.field_order != b.field_order:
        raise FieldError(f"operands from GF({a.field_order}) and GF({b.field_order})")


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return FieldElement(tuple((x + y) % P for x, y in zip(a.coeffs, b.coeffs)), a.field_order)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    n = degree_of(a.field_order)
    modulus = MODULI[a.field_order]
    prod = [0] * (2 * n - 1)
    for i in range(n):
        for j in range(n):
            prod[i + j] += a.coeffs[i] * b.coeffs[j]
    # x^k = -(m_0 + ... + m_{n-1} x^{n-1}) x^{k-n}; reduce from the top down
    for k in range(len(prod) - 1, n - 1, -1):
        top = prod[k] % P
        prod[k] = 0
        if top:
            for i in range(n):
                prod[k - n + i] -= top * modulus[i]
    coeffs = [c % P for c in prod[:n]] + [0] * (3 - n)
    return FieldElement(tuple(coeffs), a.field_order)


def inverse(a: FieldElement) -> FieldElement:
    if a.is_zero():
        raise ZeroDivisionError("zero has no multiplicative inverse")
    # a^(q-2) by Lagrange
    return a ** (a.field_order - 2)


def trace(a: FieldElement) -> int:
    """Absolute trace a + a^3 (+ a^9) as an integer in {0, 1, 2}."""
    total = a
    conj = a
    for _ in range(degree_of(a.field_order) - 1):
        conj = conj * conj * conj
        total = total + conj
    if any(total.coeffs[1:]):
        raise FieldError(f"trace of {a} left the prime field: {total}")
    return total.coeffs[0]


def enumerate_field(spec: FieldSpec) -> list[FieldElement]:
    return list(spec.enumeration)


def element(order: int, *coeffs: int) -> FieldElement:
    """Shorthand: ``element(9, 1, 2)`` is ``1 + 2a`` in GF(9)."""
    c = list(coeffs) + [0] * (3 - len(coeffs))
    return FieldElement(tuple(c), order)
