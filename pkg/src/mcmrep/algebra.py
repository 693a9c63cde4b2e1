"""Graded algebras presented as free modules over a central weighted
polynomial subring, and framed module structures on V ⊗ R.

The algebra A is input as ⊕_i R(a_i) with generator 0 the unit (a_0 = 0) and
structure constants c^l_{ij} ∈ R expanding α_i·α_j = Σ_l c^l_{ij}·α_l.  This
realizes A as a free R-module by construction, so A itself, and every framed
module it accepts, is automatically free over R.

A converter from small commutative hypersurface presentations k[x,..]/(f)
with a chosen graded Noether normalization builds the same data by exact
linear algebra in each degree.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .graded import GradedDims, GradedFreeModule, WeightedPolyRing, hilbert_series
from .polys import (
    Poly,
    homogeneous_degree,
    p_add,
    p_const,
    p_is_zero,
    p_mul,
    pm_eye,
    pm_is_zero,
    pm_mul,
    pm_scale,
    pm_sub,
    pm_zeros,
    poly_str,
)

__all__ = [
    "AlgebraError",
    "AlgebraInput",
    "FramedModule",
    "NotAModuleError",
    "QuotientContext",
    "RelationPresentation",
    "TruncatedGradedAlgebra",
    "WindowExhaustedError",
    "algebra_as_module",
    "algebra_from_quotient",
    "build_truncated_algebra",
    "conjugate_module",
    "default_truncation",
    "deg0_inverse",
    "direct_sum",
    "make_framed_module",
    "random_group_element",
    "shift_module",
    "validate_module",
]


class AlgebraError(ValueError):
    pass


class NotAModuleError(ValueError):
    pass


class WindowExhaustedError(RuntimeError):
    """A degreewise scan needed internal degrees beyond the truncation bound."""


@dataclass(frozen=True)
class RelationPresentation:
    """Optional non-free presentation data τ : ⊕R(b_k) -> ⊕R(a_i); entry
    (i, k) is homogeneous of degree a_i - b_k.  Used only for emitting linear
    relation equations alongside the multiplicativity system."""

    b_shifts: tuple[int, ...]
    tau: list  # PolyMat, shape (num generators, len(b_shifts))


@dataclass(frozen=True)
class AlgebraInput:
    ring: WeightedPolyRing
    p: int
    gen_shifts: tuple[int, ...]  # a_i <= 0, generator 0 the unit with a_0 = 0
    structure_constants: tuple  # sc[i][j] = tuple of len(gen_shifts) polys
    commutative: bool = True
    isolated_singularity: bool = False
    relations: RelationPresentation | None = None


def default_truncation(alpha: int, framing_spread: int | None = None) -> int:
    if framing_spread is None:
        framing_spread = alpha + 4
    return 4 * (alpha + framing_spread) + 8


class TruncatedGradedAlgebra:
    """Validated algebra model with per-degree bases and multiplication.

    Immutable after construction; caches are append-only, so shared reads
    from multiple threads are safe.
    """

    def __init__(self, inp: AlgebraInput, D: int):
        self.input = inp
        self.ring = inp.ring
        self.p = inp.p
        self.gen_shifts = inp.gen_shifts
        self.gen_degrees = tuple(-a for a in inp.gen_shifts)
        self.num_gens = len(inp.gen_shifts)
        self.commutative = inp.commutative
        self.isolated_singularity = inp.isolated_singularity
        self.D = D
        self.alpha = max(self.gen_degrees)
        self.free_module = GradedFreeModule(inp.ring, inp.gen_shifts)
        self._basis_cache: dict[int, tuple] = {}
        self._basis_index_cache: dict[int, dict] = {}
        self._mult_cache: dict[tuple[int, int], np.ndarray] = {}
        self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self):
        inp = self.input
        linalg.check_prime(inp.p)
        if not inp.gen_shifts or inp.gen_shifts[0] != 0:
            raise AlgebraError("generator 0 must be the unit with shift 0")
        if any(a > 0 for a in inp.gen_shifts):
            raise AlgebraError("generator shifts must be <= 0 (non-negative grading)")
        g = self.num_gens
        sc = inp.structure_constants
        if len(sc) != g or any(len(row) != g for row in sc):
            raise AlgebraError("structure constants must cover every generator pair")
        for i in range(g):
            for j in range(g):
                if len(sc[i][j]) != g:
                    raise AlgebraError(f"expansion of pair ({i + 1},{j + 1}) has wrong length")
                for l in range(g):
                    c = sc[i][j][l]
                    if p_is_zero(c):
                        continue
                    want = self.gen_degrees[i] + self.gen_degrees[j] - self.gen_degrees[l]
                    try:
                        got = homogeneous_degree(self.ring, c)
                    except ValueError as exc:
                        raise AlgebraError(
                            f"inhomogeneous structure constant for pair ({i + 1},{j + 1})"
                        ) from exc
                    if got != want:
                        raise AlgebraError(
                            f"structure constant c^{l + 1}_({i + 1},{j + 1}) has degree "
                            f"{got}, expected {want}"
                        )
        one = p_const(1, self.ring.num_vars, self.p)
        for j in range(g):
            for l in range(g):
                want = one if l == j else {}
                if sc[0][j][l] != want or sc[j][0][l] != want:
                    raise AlgebraError("generator 0 does not act as a two-sided unit")
        if inp.commutative:
            for i in range(g):
                for j in range(i + 1, g):
                    if sc[i][j] != sc[j][i]:
                        raise AlgebraError(
                            f"commutative flag set but pair ({i + 1},{j + 1}) is asymmetric"
                        )
        self._validate_associativity()
        if inp.relations is not None:
            rel = inp.relations
            if len(rel.tau) != g:
                raise AlgebraError("relation matrix must have one row per generator")
            for k, b in enumerate(rel.b_shifts):
                for i in range(g):
                    entry = rel.tau[i][k]
                    if p_is_zero(entry):
                        continue
                    want = inp.gen_shifts[i] - b
                    if homogeneous_degree(self.ring, entry) != want:
                        raise AlgebraError(
                            f"relation entry ({i + 1},{k + 1}) has wrong degree"
                        )

    def _validate_associativity(self):
        g = self.num_gens
        sc = self.input.structure_constants
        p = self.p
        for i in range(1, g):
            for j in range(1, g):
                for k in range(1, g):
                    for m in range(g):
                        lhs: Poly = {}
                        rhs: Poly = {}
                        for l in range(g):
                            lhs = p_add(lhs, p_mul(sc[i][j][l], sc[l][k][m], p), p)
                            rhs = p_add(rhs, p_mul(sc[j][k][l], sc[i][l][m], p), p)
                        if lhs != rhs:
                            raise AlgebraError(
                                f"structure constants are not associative: triple "
                                f"({i + 1},{j + 1},{k + 1}) fails in component {m + 1}"
                            )

    # -- graded pieces ----------------------------------------------------

    def dim(self, d: int) -> int:
        return self.free_module.degree_dim(d)

    def basis(self, d: int):
        """Basis of A_d as (generator index, R-exponent tuple)."""
        if d > self.D:
            raise WindowExhaustedError(
                f"degree {d} exceeds truncation bound D={self.D}; rebuild with larger D"
            )
        if d not in self._basis_cache:
            self._basis_cache[d] = self.free_module.degree_basis(d)
        return self._basis_cache[d]

    def basis_index(self, d: int) -> dict:
        if d not in self._basis_index_cache:
            self._basis_index_cache[d] = {b: i for i, b in enumerate(self.basis(d))}
        return self._basis_index_cache[d]

    def hilbert(self):
        V = GradedDims.make({e: sum(1 for x in self.gen_degrees if x == e)
                             for e in set(self.gen_degrees)})
        return hilbert_series(V, self.ring)

    def is_connected(self) -> bool:
        return sum(1 for e in self.gen_degrees if e == 0) == 1

    def check_connected_finite(self) -> dict:
        dim_a0 = sum(1 for e in self.gen_degrees if e == 0)
        return {
            "connected": dim_a0 == 1,
            "dim_A0": dim_a0,
            "free_over_R": True,  # by construction of the structure-constant model
            "rank_over_R": self.num_gens,
            "alpha": self.alpha,
        }

    # -- elements ---------------------------------------------------------

    def zero_elem(self) -> tuple:
        return tuple({} for _ in range(self.num_gens))

    def unit_elem(self) -> tuple:
        out = [{} for _ in range(self.num_gens)]
        out[0] = p_const(1, self.ring.num_vars, self.p)
        return tuple(out)

    def gen_elem(self, l: int) -> tuple:
        out = [{} for _ in range(self.num_gens)]
        out[l] = p_const(1, self.ring.num_vars, self.p)
        return tuple(out)

    def elem_add(self, a, b) -> tuple:
        return tuple(p_add(x, y, self.p) for x, y in zip(a, b))

    def elem_scale(self, f: Poly, a) -> tuple:
        return tuple(p_mul(f, x, self.p) for x in a)

    def elem_mul(self, a, b) -> tuple:
        """Exact product in A of two coefficient vectors over the generators."""
        sc = self.input.structure_constants
        p = self.p
        out = [dict() for _ in range(self.num_gens)]
        for n, fn in enumerate(a):
            if not fn:
                continue
            for l, gl in enumerate(b):
                if not gl:
                    continue
                fg = p_mul(fn, gl, p)
                for m, c in enumerate(sc[n][l]):
                    if c:
                        out[m] = p_add(out[m], p_mul(fg, c, p), p)
        return tuple(out)

    def elem_is_zero(self, a) -> bool:
        return all(not x for x in a)

    def elem_degree(self, a):
        """Internal degree of a homogeneous element; None for zero."""
        deg = None
        for l, f in enumerate(a):
            if not f:
                continue
            d = homogeneous_degree(self.ring, f) + self.gen_degrees[l]
            if deg is None:
                deg = d
            elif d != deg:
                raise AlgebraError("inhomogeneous algebra element")
        return deg

    def elem_coords(self, a, d: int) -> np.ndarray:
        idx = self.basis_index(d)
        v = np.zeros(len(idx), dtype=np.int64)
        for l, f in enumerate(a):
            for mono, c in f.items():
                v[idx[(l, mono)]] = c
        return v

    def coords_to_elem(self, v: np.ndarray, d: int) -> tuple:
        out = [dict() for _ in range(self.num_gens)]
        for (l, mono), c in zip(self.basis(d), (int(x) for x in v)):
            if c % self.p:
                out[l][mono] = c % self.p
        return tuple(out)

    def elem_str(self, a) -> str:
        parts = []
        for l, f in enumerate(a):
            if f:
                parts.append(f"({poly_str(f, self.ring)})*g{l + 1}")
        return " + ".join(parts) if parts else "0"

    def elem_mult_matrix(self, a, d: int) -> np.ndarray:
        """Matrix of left multiplication by a : A_d -> A_{d + deg a}."""
        e = self.elem_degree(a)
        if e is None:
            return np.zeros((0, self.dim(d)), dtype=np.int64)
        src = self.basis(d)
        tgt_idx = self.basis_index(d + e)
        mat = np.zeros((len(tgt_idx), len(src)), dtype=np.int64)
        for col, (l, mono) in enumerate(src):
            prod = self.elem_mul(a, self.gen_elem(l))
            for m, f in enumerate(prod):
                for mprod, c in f.items():
                    key = (m, tuple(x + y for x, y in zip(mprod, mono)))
                    mat[tgt_idx[key], col] = c
        return mat

    def multiplication_table(self, d1: int, d2: int) -> np.ndarray:
        """Bilinear multiplication A_{d1} × A_{d2} -> A_{d1+d2} as an array of
        shape (dim d1, dim d2, dim d1+d2)."""
        key = (d1, d2)
        if key not in self._mult_cache:
            if d1 + d2 > self.D:
                raise WindowExhaustedError(
                    f"multiplication table ({d1},{d2}) exceeds truncation bound {self.D}"
                )
            b1, b2 = self.basis(d1), self.basis(d2)
            out = np.zeros((len(b1), len(b2), self.dim(d1 + d2)), dtype=np.int64)
            idx = self.basis_index(d1 + d2)
            for i1, (l1, m1) in enumerate(b1):
                for i2, (l2, m2) in enumerate(b2):
                    prod = self.elem_mul(self.gen_elem(l1), self.gen_elem(l2))
                    mono_shift = tuple(x + y for x, y in zip(m1, m2))
                    for m, f in enumerate(prod):
                        for mono, c in f.items():
                            key2 = (m, tuple(x + y for x, y in zip(mono, mono_shift)))
                            out[i1, i2, idx[key2]] = c
            self._mult_cache[key] = out
        return self._mult_cache[key]


def build_truncated_algebra(inp: AlgebraInput, D: int | None = None) -> TruncatedGradedAlgebra:
    alpha = max(-a for a in inp.gen_shifts) if inp.gen_shifts else 0
    if D is None:
        D = default_truncation(alpha)
    return TruncatedGradedAlgebra(inp, D)


# -- framed modules -------------------------------------------------------


@dataclass
class FramedModule:
    """A point of the representation space: a graded A-module structure on
    V ⊗ R extending the free R-structure.

    `slots` lists the framing summands as (degree, index) pairs in canonical
    order; `actions[i]` is the poly matrix of generator i (1-based interior
    generators start at index 1; the unit is implicit)."""

    algebra: TruncatedGradedAlgebra
    V: GradedDims
    slots: tuple[tuple[int, int], ...]
    actions: dict[int, list]
    name: str | None = None
    _slot_index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._slot_index:
            self._slot_index = {s: i for i, s in enumerate(self.slots)}

    def rank(self) -> int:
        return self.V.rank()

    def action(self, i: int) -> list:
        if i == 0:
            return pm_eye(len(self.slots), self.algebra.ring.num_vars, self.algebra.p)
        return self.actions[i]

    def slot_degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.slots)

    def with_name(self, name: str) -> "FramedModule":
        return FramedModule(self.algebra, self.V, self.slots, self.actions, name)


def framing_slots(V: GradedDims) -> tuple[tuple[int, int], ...]:
    out = []
    for d, n in V.dims:
        for u in range(n):
            out.append((d, u))
    return tuple(out)


def make_framed_module(
    A: TruncatedGradedAlgebra,
    V: GradedDims,
    actions: dict[int, list],
    name: str | None = None,
    check: bool = True,
) -> FramedModule:
    """Validate degree homogeneity and the structure-constant relations, then
    return the framed module.  Raises NotAModuleError on failure."""
    slots = framing_slots(V)
    n = len(slots)
    acts = {}
    for i in range(1, A.num_gens):
        mat = actions.get(i)
        if mat is None:
            mat = pm_zeros(n, n)
        if len(mat) != n or any(len(row) != n for row in mat):
            raise NotAModuleError(
                f"action of generator {i + 1} must be {n}x{n} for this framing"
            )
        acts[i] = [[dict(f) for f in row] for row in mat]
    M = FramedModule(A, V, slots, acts, name)
    if check:
        validate_module(M)
    return M


def validate_module(M: FramedModule):
    A = M.algebra
    p = A.p
    slots = M.slots
    for i in range(1, A.num_gens):
        e = A.gen_degrees[i]
        mat = M.actions[i]
        for t, (s_deg, _) in enumerate(slots):
            for q, (r_deg, _) in enumerate(slots):
                f = mat[t][q]
                if p_is_zero(f):
                    continue
                want = r_deg + e - s_deg
                try:
                    got = homogeneous_degree(A.ring, f)
                except ValueError as exc:
                    raise NotAModuleError(
                        f"generator {i + 1}: entry ({t},{q}) is inhomogeneous"
                    ) from exc
                if got != want:
                    raise NotAModuleError(
                        f"generator {i + 1}: entry ({t},{q}) has degree {got}, "
                        f"expected {want}"
                    )
    sc = A.input.structure_constants
    n = len(slots)
    for i in range(1, A.num_gens):
        ai = M.actions[i]
        for j in range(1, A.num_gens):
            lhs = pm_mul(ai, M.actions[j], p)
            rhs = pm_zeros(n, n)
            for l in range(A.num_gens):
                c = sc[i][j][l]
                if p_is_zero(c):
                    continue
                rhs = _pm_add_scaled(rhs, c, M.action(l), p)
            diff = pm_sub(lhs, rhs, p)
            if not pm_is_zero(diff):
                t, q = _first_nonzero(diff)
                deg = homogeneous_degree(A.ring, diff[t][q])
                raise NotAModuleError(
                    f"not a module: relation for generator pair ({i + 1},{j + 1}) "
                    f"fails at entry ({t},{q}) in internal degree offset {deg}"
                )


def _pm_add_scaled(acc, c: Poly, mat, p: int):
    scaled = pm_scale(c, mat, p)
    return [[p_add(x, y, p) for x, y in zip(ra, rb)] for ra, rb in zip(acc, scaled)]


def _first_nonzero(mat):
    for t, row in enumerate(mat):
        for q, f in enumerate(row):
            if f:
                return t, q
    raise ValueError("matrix is zero")


def algebra_as_module(A: TruncatedGradedAlgebra, name: str = "A") -> FramedModule:
    """A viewed as a left module over itself, framed by its generators."""
    degs: dict[int, int] = {}
    slot_of_gen = []
    for e in A.gen_degrees:
        slot_of_gen.append((e, degs.get(e, 0)))
        degs[e] = degs.get(e, 0) + 1
    V = GradedDims.make(degs)
    slots = framing_slots(V)
    slot_idx = {s: i for i, s in enumerate(slots)}
    n = len(slots)
    actions = {}
    sc = A.input.structure_constants
    for i in range(1, A.num_gens):
        mat = pm_zeros(n, n)
        for j in range(A.num_gens):  # column: α_i · α_j = Σ_l c^l_{ij} α_l
            col = slot_idx[slot_of_gen[j]]
            for l in range(A.num_gens):
                c = sc[i][j][l]
                if c:
                    row = slot_idx[slot_of_gen[l]]
                    mat[row][col] = p_add(mat[row][col], c, A.p)
        actions[i] = mat
    return make_framed_module(A, V, actions, name=name)


def shift_module(M: FramedModule, a: int) -> FramedModule:
    """M(a): framing degrees drop by a, action entries unchanged."""
    if a == 0:
        return M
    V = M.V.shifted(a)
    name = f"{M.name}({a})" if M.name else None
    return make_framed_module(M.algebra, V, M.actions, name=name, check=False)


def direct_sum(M: FramedModule, N: FramedModule, name: str | None = None) -> FramedModule:
    A = M.algebra
    if N.algebra is not A:
        raise ValueError("direct sum requires modules over the same algebra")
    V = M.V + N.V
    slots = framing_slots(V)
    # assign each summand's slots to fresh positions, by degree
    used: dict[int, int] = {}

    def place(mod_slots):
        pos = []
        for d, _ in mod_slots:
            u = used.get(d, 0)
            pos.append(slots.index((d, u)))
            used[d] = u + 1
        return pos

    pos_m = place(M.slots)
    pos_n = place(N.slots)
    n = len(slots)
    actions = {}
    for i in range(1, A.num_gens):
        mat = pm_zeros(n, n)
        for t in range(len(M.slots)):
            for q in range(len(M.slots)):
                if M.actions[i][t][q]:
                    mat[pos_m[t]][pos_m[q]] = dict(M.actions[i][t][q])
        for t in range(len(N.slots)):
            for q in range(len(N.slots)):
                if N.actions[i][t][q]:
                    mat[pos_n[t]][pos_n[q]] = dict(N.actions[i][t][q])
        actions[i] = mat
    if name is None and M.name and N.name:
        name = f"{M.name}+{N.name}"
    return make_framed_module(A, V, actions, name=name, check=False)


# -- the framing group ----------------------------------------------------


def random_group_element(M_or_A, V: GradedDims | None = None, rng=None):
    """Random element of the degree-0 automorphism group of V ⊗ R, as a poly
    matrix (invertible by construction: diagonal blocks are resampled until
    invertible)."""
    if isinstance(M_or_A, FramedModule):
        A, V = M_or_A.algebra, M_or_A.V
    else:
        A = M_or_A
    assert V is not None
    p = A.p
    rng = rng if rng is not None else np.random.default_rng(0)
    slots = framing_slots(V)
    n = len(slots)
    g = pm_zeros(n, n)
    for d, nd in V.dims:
        block_pos = [i for i, (deg, _) in enumerate(slots) if deg == d]
        while True:
            blk = rng.integers(0, p, size=(nd, nd), dtype=np.int64)
            if linalg.inv(blk, p) is not None:
                break
        for a, i in enumerate(block_pos):
            for b, j in enumerate(block_pos):
                if blk[a, b]:
                    g[i][j] = p_const(int(blk[a, b]), A.ring.num_vars, p)
    for t, (s_deg, _) in enumerate(slots):
        for q, (r_deg, _) in enumerate(slots):
            if r_deg <= s_deg:
                continue
            f: Poly = {}
            for mono in A.ring.monomial_basis(r_deg - s_deg):
                c = int(rng.integers(0, p))
                if c:
                    f[mono] = c
            if f:
                g[t][q] = f
    return g


def deg0_inverse(A: TruncatedGradedAlgebra, V: GradedDims, g) -> list:
    """Inverse of a degree-0 automorphism of V ⊗ R.

    Splits g = D + N with D the constant same-degree blocks and N the strictly
    degree-raising rest; N is nilpotent, so a finite Neumann series applies.
    """
    p = A.p
    slots = framing_slots(V)
    n = len(slots)
    nvars = A.ring.num_vars
    D = pm_zeros(n, n)
    N = pm_zeros(n, n)
    for t in range(n):
        for q in range(n):
            if slots[t][0] == slots[q][0]:
                D[t][q] = dict(g[t][q])
            else:
                N[t][q] = dict(g[t][q])
    Dinv = pm_zeros(n, n)
    for d, _ in V.dims:
        pos = [i for i, (deg, _) in enumerate(slots) if deg == d]
        blk = np.zeros((len(pos), len(pos)), dtype=np.int64)
        zero_mono = (0,) * nvars
        for a, i in enumerate(pos):
            for b, j in enumerate(pos):
                blk[a, b] = D[i][j].get(zero_mono, 0)
        blk_inv = linalg.inv(blk, p)
        if blk_inv is None:
            raise ValueError("group element has singular diagonal block")
        for a, i in enumerate(pos):
            for b, j in enumerate(pos):
                if blk_inv[a, b]:
                    Dinv[i][j] = p_const(int(blk_inv[a, b]), nvars, p)
    # (D + N)^-1 = sum_k (-Dinv N)^k Dinv over the finitely many degrees
    result = [row[:] for row in Dinv]
    term = [row[:] for row in Dinv]
    for _ in range(len(V.dims)):
        term = pm_mul(pm_scale(p_const(-1, nvars, p), pm_mul(Dinv, N, p), p), term, p)
        if pm_is_zero(term):
            break
        result = [[p_add(x, y, p) for x, y in zip(ra, rb)] for ra, rb in zip(result, term)]
    check = pm_mul(g, result, p)
    if not pm_eq_identity(check, nvars, p):
        raise AssertionError("degree-0 inverse verification failed")
    return result


def pm_eq_identity(mat, nvars: int, p: int) -> bool:
    n = len(mat)
    one = p_const(1, nvars, p)
    for i in range(n):
        for j in range(n):
            want = one if i == j else {}
            if mat[i][j] != want:
                return False
    return True


def conjugate_module(M: FramedModule, g, ginv=None, name: str | None = None) -> FramedModule:
    """Change of basis: actions become g · act · g^{-1}."""
    A = M.algebra
    if ginv is None:
        ginv = deg0_inverse(A, M.V, g)
    actions = {}
    for i in range(1, A.num_gens):
        actions[i] = pm_mul(pm_mul(g, M.actions[i], A.p), ginv, A.p)
    return make_framed_module(A, M.V, actions, name=name, check=False)


# -- converter from hypersurface quotient presentations --------------------


class _DegreeReduction:
    """Reduction of S_d modulo the degree-d slice of a principal ideal (f)."""

    def __init__(self, S: WeightedPolyRing, f: Poly, d: int, p: int):
        self.monos = S.monomial_basis(d)
        self.index = {m: i for i, m in enumerate(self.monos)}
        df = homogeneous_degree(S, f)
        rows = []
        for m in S.monomial_basis(d - df):
            row = np.zeros(len(self.monos), dtype=np.int64)
            for fm, c in f.items():
                row[self.index[tuple(a + b for a, b in zip(fm, m))]] = c
            rows.append(row)
        if rows:
            mat = np.array(rows, dtype=np.int64)
            self.rref, piv = linalg.rref(mat, p)
            self.pivots = piv
        else:
            self.rref = np.zeros((0, len(self.monos)), dtype=np.int64)
            self.pivots = []
        pivset = set(self.pivots)
        self.free_positions = [i for i in range(len(self.monos)) if i not in pivset]
        self.p = p

    @property
    def dim(self) -> int:
        return len(self.free_positions)

    def reduce_vec(self, v: np.ndarray) -> np.ndarray:
        """Canonical representative coordinates in the quotient basis."""
        w = v.copy() % self.p
        for r, c in enumerate(self.pivots):
            if w[c]:
                w = (w - w[c] * self.rref[r]) % self.p
        return w[self.free_positions]

    def reduce_poly(self, f: Poly) -> np.ndarray:
        v = np.zeros(len(self.monos), dtype=np.int64)
        for m, c in f.items():
            v[self.index[m]] = c
        return self.reduce_vec(v)

    def lift(self, coords: np.ndarray) -> Poly:
        out: Poly = {}
        for pos, c in zip(self.free_positions, (int(x) for x in coords)):
            if c % self.p:
                out[self.monos[pos]] = c % self.p
        return out


@dataclass
class QuotientContext:
    """Presentation data kept alive for matrix-factorization clients."""

    S: WeightedPolyRing
    f: Poly
    r_gen_polys: list
    gen_reps: list  # (degree, S-poly) per algebra generator, unit first
    rank: int
    p: int
    _reductions: dict = field(default_factory=dict)

    def reduction(self, d: int) -> _DegreeReduction:
        if d not in self._reductions:
            self._reductions[d] = _DegreeReduction(self.S, self.f, d, self.p)
        return self._reductions[d]

    def r_mono_as_s_poly(self, mono: tuple[int, ...]) -> Poly:
        out = p_const(1, self.S.num_vars, self.p)
        for gen, e in zip(self.r_gen_polys, mono):
            for _ in range(e):
                out = p_mul(out, gen, self.p)
        return out


def algebra_from_quotient(
    S: WeightedPolyRing,
    ideal_gens: list,
    normalization: list,
    p: int,
    *,
    commutative: bool = True,
    isolated_singularity: bool = True,
    r_names: tuple[str, ...] | None = None,
    D: int | None = None,
):
    """Build the structure-constant model of A = S/(f) over the subring R
    generated by the chosen homogeneous normalization elements.

    Only principal ideals are supported: the R-rank of A is then determined
    by degree bookkeeping, which certifies that the generator scan below is
    complete.  Returns (TruncatedGradedAlgebra, QuotientContext).
    """
    linalg.check_prime(p)
    if len(ideal_gens) != 1:
        raise AlgebraError("quotient converter supports principal ideals only")
    f = ideal_gens[0]
    df = homogeneous_degree(S, f)
    if df is None or df <= 0:
        raise AlgebraError("relation polynomial must be homogeneous of positive degree")
    r_weights = []
    for g in normalization:
        dg = homogeneous_degree(S, g)
        if dg is None or dg <= 0:
            raise AlgebraError("normalization elements must be homogeneous of positive degree")
        r_weights.append(dg)
    if len(r_weights) != S.num_vars - 1:
        raise AlgebraError(
            "normalization must have one element per dimension of the hypersurface"
        )
    num = df
    for w in r_weights:
        num *= w
    den = 1
    for w in S.weights:
        den *= w
    if num % den:
        raise AlgebraError("degree data incompatible with a free normalization")
    rank = num // den
    R = WeightedPolyRing.make(r_weights, r_names)
    ctx = QuotientContext(S, f, list(normalization), [], rank, p)

    # scan for R-module generators of A, certified complete by rank exhaustion
    gens: list[tuple[int, Poly]] = []
    d = 0
    max_scan = 4 * (df + sum(r_weights)) + 8
    while len(gens) < rank:
        if d > max_scan:
            raise AlgebraError("generator scan exhausted: is the normalization module-finite?")
        red = ctx.reduction(d)
        if red.dim:
            cols = []
            for j, w in enumerate(r_weights):
                red_lo = ctx.reduction(d - w)
                for k in range(red_lo.dim):
                    lift = red_lo.lift(np.eye(red_lo.dim, dtype=np.int64)[k])
                    prod = p_mul(lift, normalization[j], p)
                    cols.append(red.reduce_poly(prod))
            span = (
                np.array(cols, dtype=np.int64).T
                if cols
                else np.zeros((red.dim, 0), dtype=np.int64)
            )
            aug = np.concatenate([span, np.eye(red.dim, dtype=np.int64)], axis=1)
            _, piv = linalg.rref(aug, p)
            ncols = span.shape[1]
            for c in piv:
                if c >= ncols:
                    coords = np.zeros(red.dim, dtype=np.int64)
                    coords[c - ncols] = 1
                    gens.append((d, red.lift(coords)))
        d += 1
    if len(gens) != rank:
        raise AlgebraError("generator count exceeded the expected rank: not free over R")
    gens.sort(key=lambda t: t[0])
    if gens[0][0] != 0:
        raise AlgebraError("expected the unit in degree 0")
    ctx.gen_reps = gens

    g = len(gens)
    gen_degs = [dg for dg, _ in gens]

    # expansion of A_d in the R-basis {m · gen_l}; cached per degree
    expand_cache: dict[int, tuple] = {}

    def expansion_matrix(d: int):
        if d not in expand_cache:
            red = ctx.reduction(d)
            cols = []
            labels = []
            for l, (dl, rep) in enumerate(gens):
                for mono in R.monomial_basis(d - dl):
                    s_poly = p_mul(ctx.r_mono_as_s_poly(mono), rep, p)
                    cols.append(red.reduce_poly(s_poly))
                    labels.append((l, mono))
            mat = (
                np.array(cols, dtype=np.int64).T
                if cols
                else np.zeros((red.dim, 0), dtype=np.int64)
            )
            if mat.shape[1] != red.dim or linalg.rank(mat, p) != red.dim:
                raise AlgebraError(
                    f"A is not free over the chosen normalization in degree {d}"
                )
            expand_cache[d] = (mat, labels, red)
        return expand_cache[d]

    sc = [[None] * g for _ in range(g)]
    one = p_const(1, R.num_vars, p)
    for i in range(g):
        for j in range(g):
            if i == 0 or j == 0:
                other = j if i == 0 else i
                sc[i][j] = tuple(one if l == other else {} for l in range(g))
                continue
            d = gen_degs[i] + gen_degs[j]
            mat, labels, red = expansion_matrix(d)
            target = red.reduce_poly(p_mul(gens[i][1], gens[j][1], p))
            x = linalg.solve(mat, target, p)
            if x is None:
                raise AlgebraError("product expansion failed: not free over R")
            out = [dict() for _ in range(g)]
            for (l, mono), c in zip(labels, (int(v) for v in x)):
                if c % p:
                    out[l][mono] = c % p
            sc[i][j] = tuple(out)

    inp = AlgebraInput(
        ring=R,
        p=p,
        gen_shifts=tuple(-dg for dg in gen_degs),
        structure_constants=tuple(tuple(row) for row in sc),
        commutative=commutative,
        isolated_singularity=isolated_singularity,
    )
    A = build_truncated_algebra(inp, D=D)
    return A, ctx
