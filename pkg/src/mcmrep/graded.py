"""Graded bookkeeping: dimension vectors, weighted polynomial rings, graded
free modules with shifts, and Hilbert series.

Degrees are signed integers throughout; shifts make negative internal degrees
unavoidable even when the algebra itself lives in non-negative degrees.  The
shift convention is M(a)_d = M_{a+d}, so the free summand R(a) has its
generator in degree -a.
"""

from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "GradedDims",
    "GradedFreeModule",
    "HilbertSeries",
    "WeightedPolyRing",
    "hilbert_series",
]


@dataclass(frozen=True)
class GradedDims:
    """Finitely supported map degree -> dimension; only nonzero entries stored."""

    dims: tuple[tuple[int, int], ...]

    @staticmethod
    def make(mapping) -> "GradedDims":
        items = []
        for d, n in dict(mapping).items():
            if n < 0:
                raise ValueError(f"negative dimension {n} in degree {d}")
            if n > 0:
                items.append((int(d), int(n)))
        return GradedDims(tuple(sorted(items)))

    def dim(self, d: int) -> int:
        for deg, n in self.dims:
            if deg == d:
                return n
        return 0

    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.dims)

    def rank(self) -> int:
        return sum(n for _, n in self.dims)

    def is_zero(self) -> bool:
        return not self.dims

    def min_degree(self) -> int:
        if not self.dims:
            raise ValueError("zero graded space has no degrees")
        return self.dims[0][0]

    def max_degree(self) -> int:
        if not self.dims:
            raise ValueError("zero graded space has no degrees")
        return self.dims[-1][0]

    def width(self) -> int:
        return self.max_degree() - self.min_degree()

    def shifted(self, a: int) -> "GradedDims":
        # V(a)_d = V_{a+d}: an entry in degree r moves to degree r - a.
        return GradedDims(tuple((d - a, n) for d, n in self.dims))

    def dual(self) -> "GradedDims":
        return GradedDims(tuple(sorted((-d, n) for d, n in self.dims)))

    def __add__(self, other: "GradedDims") -> "GradedDims":
        acc = {d: n for d, n in self.dims}
        for d, n in other.dims:
            acc[d] = acc.get(d, 0) + n
        return GradedDims.make(acc)

    def to_dict(self) -> dict[int, int]:
        return {d: n for d, n in self.dims}


@lru_cache(maxsize=None)
def _monomials(weights: tuple[int, ...], d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of weighted degree exactly d, lexicographically descending."""
    if d < 0:
        return ()
    if not weights:
        return ((),) if d == 0 else ()
    w = weights[0]
    out = []
    for e in range(d // w, -1, -1):
        for rest in _monomials(weights[1:], d - e * w):
            out.append((e,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class WeightedPolyRing:
    """Polynomial ring with positively weighted variables (not necessarily
    standard-graded)."""

    weights: tuple[int, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.names):
            raise ValueError("weights and names must have equal length")
        if any(w < 1 for w in self.weights):
            raise ValueError("all variable weights must be >= 1")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")

    @staticmethod
    def make(weights, names=None) -> "WeightedPolyRing":
        weights = tuple(int(w) for w in weights)
        if names is None:
            names = ("t",) if len(weights) == 1 else tuple(f"t{i}" for i in range(len(weights)))
        return WeightedPolyRing(weights, tuple(names))

    @property
    def num_vars(self) -> int:
        return len(self.weights)

    def degree_dim(self, d: int) -> int:
        return len(_monomials(self.weights, d))

    def monomial_basis(self, d: int) -> tuple[tuple[int, ...], ...]:
        return _monomials(self.weights, d)

    def monomial_index(self, d: int, expt: tuple[int, ...]) -> int:
        return _monomial_index(self.weights, d)[expt]

    def monomial_degree(self, expt) -> int:
        return sum(e * w for e, w in zip(expt, self.weights))


@lru_cache(maxsize=None)
def _monomial_index(weights: tuple[int, ...], d: int) -> dict:
    return {m: i for i, m in enumerate(_monomials(weights, d))}


@dataclass(frozen=True)
class GradedFreeModule:
    """Free module ⊕_i R(a_i); component in degree d is ⊕_i R_{d + a_i}."""

    ring: WeightedPolyRing
    shifts: tuple[int, ...]

    def degree_dim(self, d: int) -> int:
        return sum(self.ring.degree_dim(d + a) for a in self.shifts)

    def degree_basis(self, d: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """Ordered basis of the degree-d component as (summand index, exponent tuple)."""
        out = []
        for i, a in enumerate(self.shifts):
            for mono in self.ring.monomial_basis(d + a):
                out.append((i, mono))
        return tuple(out)


@dataclass(frozen=True)
class HilbertSeries:
    """numerator(t) / prod_j (1 - t^{w_j}), expanded on demand."""

    numerator: tuple[tuple[int, int], ...]  # sorted (degree, coeff), coeff != 0
    weights: tuple[int, ...]

    @staticmethod
    def make(numerator_map, weights) -> "HilbertSeries":
        items = tuple(sorted((int(d), int(c)) for d, c in dict(numerator_map).items() if c != 0))
        return HilbertSeries(items, tuple(weights))

    def coefficients(self, lo: int, hi: int) -> list[int]:
        """Series coefficients for degrees lo..hi inclusive."""
        if not self.numerator:
            return [0] * (hi - lo + 1)
        start = min(d for d, _ in self.numerator)
        if hi < start:
            return [0] * (hi - lo + 1)
        length = hi - start + 1
        series = [0] * length
        for d, c in self.numerator:
            if d <= hi:
                series[d - start] += c
        for w in self.weights:
            for i in range(w, length):
                series[i] += series[i - w]
        out = []
        for d in range(lo, hi + 1):
            out.append(series[d - start] if d >= start else 0)
        return out

    def coefficient(self, d: int) -> int:
        return self.coefficients(d, d)[0]

    def __str__(self) -> str:
        if not self.numerator:
            return "0"
        terms = []
        for d, c in self.numerator:
            if d == 0:
                terms.append(f"{c}")
            else:
                coeff = "" if c == 1 else f"{c}*"
                terms.append(f"{coeff}t^{d}")
        num = " + ".join(terms)
        den = "".join(f"(1 - t^{w})" for w in self.weights)
        return f"({num}) / {den}" if den else f"({num})"


def hilbert_series(V: GradedDims, ring: WeightedPolyRing) -> HilbertSeries:
    """Hilbert series of the graded free module V ⊗ R."""
    return HilbertSeries.make(V.to_dict(), ring.weights)
