"""The ambient coordinate space of framed module structures and the quadratic
equation system cutting out the representation variety, together with the
change-of-basis group data.

Coordinates parameterize, for every non-unit generator, every matrix slot and
every R-monomial of the slot's degree.  The unit generator's image is fixed
to the identity and contributes no coordinates, which removes the unit
equations altogether; multiplicativity of each generator pair contributes the
quadratic equations, and an optional relation presentation contributes linear
ones.  Every equation is the coefficient of a single R-monomial in a single
matrix slot, hence homogeneous for the internal grading.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import FramedModule, TruncatedGradedAlgebra, framing_slots
from .graded import GradedDims, WeightedPolyRing
from .polys import pm_zeros

__all__ = [
    "CoordinateSpace",
    "Equation",
    "EquationSystem",
    "FramingMismatchError",
    "GroupInfo",
    "PointCheck",
    "coordinate_space",
    "coords_of_actions",
    "generate_equations",
    "evaluate_point",
    "group_info",
    "lie_basis_polymats",
]


class FramingMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Coordinate:
    gen: int  # internal generator index >= 1
    t_slot: int
    s_slot: int
    mono: tuple[int, ...]


class CoordinateSpace:
    """Deterministic enumeration of the ambient affine coordinates."""

    def __init__(self, A: TruncatedGradedAlgebra, V: GradedDims):
        self.algebra = A
        self.V = V
        self.slots = framing_slots(V)
        coords: list[Coordinate] = []
        entries: dict[int, dict[tuple[int, int], list]] = {}
        for i in range(1, A.num_gens):
            e = A.gen_degrees[i]
            per_slot: dict[tuple[int, int], list] = {}
            for t, (sdeg, _) in enumerate(self.slots):
                for s, (rdeg, _) in enumerate(self.slots):
                    lst = []
                    for mono in A.ring.monomial_basis(rdeg + e - sdeg):
                        lst.append((len(coords), mono))
                        coords.append(Coordinate(i, t, s, mono))
                    per_slot[(t, s)] = lst
            entries[i] = per_slot
        self.coords = tuple(coords)
        self.entries = entries

    @property
    def total_dim(self) -> int:
        return len(self.coords)

    def extract(self, M: FramedModule) -> np.ndarray:
        """Coordinates of a framed module (its action-matrix coefficients)."""
        if M.V != self.V:
            raise FramingMismatchError(
                f"module framing {M.V.to_dict()} does not match space framing "
                f"{self.V.to_dict()}"
            )
        vec = np.zeros(self.total_dim, dtype=np.int64)
        for k, c in enumerate(self.coords):
            vec[k] = M.actions[c.gen][c.t_slot][c.s_slot].get(c.mono, 0)
        return vec

    def actions_from(self, vec: np.ndarray) -> dict[int, list]:
        A = self.algebra
        n = len(self.slots)
        actions = {i: pm_zeros(n, n) for i in range(1, A.num_gens)}
        for k, c in enumerate(self.coords):
            v = int(vec[k]) % A.p
            if v:
                actions[c.gen][c.t_slot][c.s_slot][c.mono] = v
        return actions

    def descriptor_json(self) -> list:
        out = []
        for c in self.coords:
            out.append(
                {
                    "generator": c.gen + 1,
                    "target_slot": list(self.slots[c.t_slot]),
                    "source_slot": list(self.slots[c.s_slot]),
                    "monomial": list(c.mono),
                }
            )
        return out


def coordinate_space(A: TruncatedGradedAlgebra, V: GradedDims) -> CoordinateSpace:
    return CoordinateSpace(A, V)


@dataclass
class Equation:
    """coefficient of `mono` in matrix slot (t_slot, s_slot) of one defining
    relation; at most quadratic in the coordinates."""

    label: str
    t_slot: int
    s_slot: int
    mono: tuple[int, ...]
    const: int
    lin: dict[int, int]
    quad: dict[tuple[int, int], int]

    def eval(self, x: np.ndarray, p: int) -> int:
        acc = self.const
        for c, v in self.lin.items():
            acc += v * int(x[c])
        for (a, b), v in self.quad.items():
            acc += v * int(x[a]) * int(x[b]) % p
        return acc % p

    def grad(self, x: np.ndarray, p: int) -> dict[int, int]:
        g = dict(self.lin)
        for (a, b), v in self.quad.items():
            g[a] = (g.get(a, 0) + v * int(x[b])) % p
            g[b] = (g.get(b, 0) + v * int(x[a])) % p
        return g


@dataclass
class PointCheck:
    ok: bool
    residuals: np.ndarray
    failures: list  # (label, value) for nonzero residuals


class EquationSystem:
    def __init__(self, space: CoordinateSpace, equations: list[Equation]):
        self.space = space
        self.equations = equations
        self.algebra = space.algebra

    def num_equations(self) -> int:
        return len(self.equations)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        p = self.algebra.p
        return np.array([eq.eval(x, p) for eq in self.equations], dtype=np.int64)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        p = self.algebra.p
        J = np.zeros((len(self.equations), self.space.total_dim), dtype=np.int64)
        for r, eq in enumerate(self.equations):
            for c, v in eq.grad(x, p).items():
                J[r, c] = v % p
        return J

    def to_json_dict(self) -> dict:
        eqs = []
        for eq in self.equations:
            eqs.append(
                {
                    "label": eq.label,
                    "slot": [
                        list(self.space.slots[eq.t_slot]),
                        list(self.space.slots[eq.s_slot]),
                    ],
                    "monomial": list(eq.mono),
                    "const": eq.const,
                    "linear": {str(k): v for k, v in sorted(eq.lin.items())},
                    "quadratic": {f"{a},{b}": v for (a, b), v in sorted(eq.quad.items())},
                }
            )
        return {
            "total_dim": self.space.total_dim,
            "coordinates": self.space.descriptor_json(),
            "equations": eqs,
        }


def generate_equations(A: TruncatedGradedAlgebra, V: GradedDims) -> EquationSystem:
    """Quadratic multiplicativity equations for every ordered generator pair,
    plus linear relation equations when a presentation was supplied."""
    space = CoordinateSpace(A, V)
    p = A.p
    slots = space.slots
    n = len(slots)
    sc = A.input.structure_constants
    equations: list[Equation] = []

    for i in range(1, A.num_gens):
        for j in range(1, A.num_gens):
            label = f"U[{i + 1},{j + 1}]"
            for t in range(n):
                for s in range(n):
                    acc: dict[tuple, Equation] = {}

                    def eq_at(mono) -> Equation:
                        if mono not in acc:
                            acc[mono] = Equation(label, t, s, mono, 0, {}, {})
                        return acc[mono]

                    for mid in range(n):
                        for ca, ma in space.entries[i][(t, mid)]:
                            for cb, mb in space.entries[j][(mid, s)]:
                                mono = tuple(x + y for x, y in zip(ma, mb))
                                key = (ca, cb) if ca <= cb else (cb, ca)
                                eq = eq_at(mono)
                                eq.quad[key] = (eq.quad.get(key, 0) + 1) % p
                    for l in range(1, A.num_gens):
                        cpoly = sc[i][j][l]
                        if not cpoly:
                            continue
                        for mc, cc in cpoly.items():
                            for cb, mb in space.entries[l][(t, s)]:
                                mono = tuple(x + y for x, y in zip(mc, mb))
                                eq = eq_at(mono)
                                eq.lin[cb] = (eq.lin.get(cb, 0) - cc) % p
                    if t == s:
                        for mc, cc in sc[i][j][0].items():
                            eq = eq_at(mc)
                            eq.const = (eq.const - cc) % p
                    for mono in sorted(acc):
                        eq = acc[mono]
                        eq.lin = {k: v for k, v in eq.lin.items() if v}
                        eq.quad = {k: v for k, v in eq.quad.items() if v}
                        if eq.const or eq.lin or eq.quad:
                            equations.append(eq)

    rel = A.input.relations
    if rel is not None:
        for k in range(len(rel.b_shifts)):
            label = f"W[{k + 1}]"
            for t in range(n):
                for s in range(n):
                    acc = {}

                    def eq_at(mono) -> Equation:
                        if mono not in acc:
                            acc[mono] = Equation(label, t, s, mono, 0, {}, {})
                        return acc[mono]

                    for l in range(1, A.num_gens):
                        taupoly = rel.tau[l][k]
                        for mc, cc in taupoly.items():
                            for cb, mb in space.entries[l][(t, s)]:
                                mono = tuple(x + y for x, y in zip(mc, mb))
                                eq = eq_at(mono)
                                eq.lin[cb] = (eq.lin.get(cb, 0) + cc) % p
                    if t == s:
                        for mc, cc in rel.tau[0][k].items():
                            eq = eq_at(mc)
                            eq.const = (eq.const + cc) % p
                    for mono in sorted(acc):
                        eq = acc[mono]
                        eq.lin = {kk: v for kk, v in eq.lin.items() if v}
                        if eq.const or eq.lin or eq.quad:
                            equations.append(eq)

    return EquationSystem(space, equations)


def evaluate_point(E: EquationSystem, M: FramedModule) -> PointCheck:
    """All residuals of the system at a framed module; zero iff it is a point
    of the representation variety."""
    x = E.space.extract(M)
    res = E.evaluate(x)
    failures = [
        (E.equations[k].label, int(v)) for k, v in enumerate(res) if v
    ]
    return PointCheck(ok=not failures, residuals=res, failures=failures)


def coords_of_actions(space: CoordinateSpace, actions: dict[int, list]) -> np.ndarray:
    """Coordinate vector of a generator-indexed family of poly matrices."""
    vec = np.zeros(space.total_dim, dtype=np.int64)
    for k, c in enumerate(space.coords):
        mat = actions.get(c.gen)
        if mat is not None:
            vec[k] = mat[c.t_slot][c.s_slot].get(c.mono, 0)
    return vec


@dataclass
class GroupInfo:
    """Dimension data of the degree-0 automorphism group of V ⊗ R and an
    ordered basis of its Lie algebra (all degree-0 endomorphisms)."""

    V: GradedDims
    ring: WeightedPolyRing
    lie_descriptors: tuple  # (t_slot, s_slot, mono)
    reductive_part_dims: tuple[int, ...]
    unipotent_dim: int

    @property
    def lie_algebra_dim(self) -> int:
        return len(self.lie_descriptors)


def group_info(V: GradedDims, ring: WeightedPolyRing) -> GroupInfo:
    slots = framing_slots(V)
    descriptors = []
    for t, (sdeg, _) in enumerate(slots):
        for s, (rdeg, _) in enumerate(slots):
            for mono in ring.monomial_basis(rdeg - sdeg):
                descriptors.append((t, s, mono))
    reductive = tuple(nd * nd for _, nd in V.dims)
    unipotent = 0
    degs = V.dims
    for di, ni in degs:
        for dj, nj in degs:
            if di > dj:
                unipotent += ni * nj * ring.degree_dim(di - dj)
    info = GroupInfo(V, ring, tuple(descriptors), reductive, unipotent)
    assert info.lie_algebra_dim == sum(reductive) + unipotent
    return info


def lie_basis_polymats(A: TruncatedGradedAlgebra, info: GroupInfo) -> list:
    """Materialize the Lie algebra basis as poly matrices on V ⊗ R."""
    slots = framing_slots(info.V)
    n = len(slots)
    out = []
    for t, s, mono in info.lie_descriptors:
        mat = pm_zeros(n, n)
        mat[t][s] = {mono: 1 % A.p}
        out.append(mat)
    return out
