"""Degree-truncated homological algebra over the structure-constant algebra:
minimal graded free resolutions, graded Hom and Ext^1 windows, and R-duality.

Everything runs degree by degree with exact linear algebra.  Completeness of
each syzygy step is *certified*, not assumed: every kernel module in sight is
free over R (kernels of maps between R-free modules with R-free cokernels),
so its R-rank is known from rank bookkeeping, and the generator scan stops
exactly when the accumulated Hilbert-numerator mass reaches that rank.  A
scan that would need internal degrees beyond the algebra's truncation bound
raises WindowExhaustedError instead of silently truncating.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import (
    AlgebraError,
    FramedModule,
    TruncatedGradedAlgebra,
    WindowExhaustedError,
    framing_slots,
    make_framed_module,
)
from .graded import GradedDims
from .polys import pm_zeros

__all__ = [
    "ExtWindow",
    "ModuleRealization",
    "TruncatedResolution",
    "default_ext_window",
    "dualize",
    "ext1_swap_check",
    "ext1_window",
    "hom_zero",
    "minimal_resolution",
    "two_periodic_pattern",
]


class ModuleRealization:
    """Per-degree linear model of a framed module: bases of each graded piece
    and matrices for the action of ring variables, algebra generators, and
    arbitrary homogeneous algebra elements."""

    def __init__(self, M: FramedModule):
        self.M = M
        self.A = M.algebra
        self.p = M.algebra.p
        self._basis: dict[int, tuple] = {}
        self._index: dict[int, dict] = {}
        self._gen_mats: dict[tuple[int, int], np.ndarray] = {}

    def basis(self, d: int) -> tuple:
        if d not in self._basis:
            out = []
            for q, (r, _) in enumerate(self.M.slots):
                for mono in self.A.ring.monomial_basis(d - r):
                    out.append((q, mono))
            self._basis[d] = tuple(out)
        return self._basis[d]

    def index(self, d: int) -> dict:
        if d not in self._index:
            self._index[d] = {b: i for i, b in enumerate(self.basis(d))}
        return self._index[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def gen_matrix(self, i: int, d: int) -> np.ndarray:
        """Action of generator i as a matrix M_d -> M_{d + e_i}."""
        key = (i, d)
        if key not in self._gen_mats:
            A = self.A
            e = A.gen_degrees[i]
            src = self.basis(d)
            tgt = self.index(d + e)
            mat = np.zeros((len(tgt), len(src)), dtype=np.int64)
            if i == 0:
                for col, b in enumerate(src):
                    mat[tgt[b], col] = 1
            else:
                act = self.M.actions[i]
                for col, (q, mono) in enumerate(src):
                    for t in range(len(self.M.slots)):
                        for mm, c in act[t][q].items():
                            b = (t, tuple(x + y for x, y in zip(mm, mono)))
                            mat[tgt[b], col] = c
            self._gen_mats[key] = mat
        return self._gen_mats[key]

    def mono_matrix(self, mono: tuple[int, ...], d: int) -> np.ndarray:
        """Multiplication by an R-monomial: M_d -> M_{d + deg mono}."""
        shift = self.A.ring.monomial_degree(mono)
        src = self.basis(d)
        tgt = self.index(d + shift)
        mat = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for col, (q, m) in enumerate(src):
            mat[tgt[(q, tuple(x + y for x, y in zip(m, mono)))], col] = 1
        return mat

    def elem_matrix(self, a, d: int) -> np.ndarray:
        """Action of a homogeneous algebra element: M_d -> M_{d + deg a}."""
        e = self.A.elem_degree(a)
        if e is None:
            raise ValueError("zero element has no action matrix")
        out = np.zeros((self.dim(d + e), self.dim(d)), dtype=np.int64)
        for l, f in enumerate(a):
            if not f:
                continue
            gm = self.gen_matrix(l, d)
            el = self.A.gen_degrees[l]
            for mono, c in f.items():
                out = (out + c * (self.mono_matrix(mono, d + el) @ gm)) % self.p
        return out


class FreeRealization:
    """Per-degree model of the graded free module ⊕_k A(-g_k)."""

    def __init__(self, A: TruncatedGradedAlgebra, gens: tuple[int, ...]):
        self.A = A
        self.p = A.p
        self.gens = gens
        self._basis: dict[int, tuple] = {}
        self._index: dict[int, dict] = {}

    def basis(self, d: int) -> tuple:
        if d not in self._basis:
            out = []
            for k, g in enumerate(self.gens):
                for b in self.A.basis(d - g):
                    out.append((k, b))
            self._basis[d] = tuple(out)
        return self._basis[d]

    def index(self, d: int) -> dict:
        if d not in self._index:
            self._index[d] = {b: i for i, b in enumerate(self.basis(d))}
        return self._index[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def elem_matrix(self, a, d: int) -> np.ndarray:
        """Left multiplication by a homogeneous element, block-diagonal over
        the free summands."""
        e = self.A.elem_degree(a)
        if e is None:
            raise ValueError("zero element has no action matrix")
        out = np.zeros((self.dim(d + e), self.dim(d)), dtype=np.int64)
        row0 = 0
        col0 = 0
        for g in self.gens:
            blk = self.A.elem_mult_matrix(a, d - g)
            r, c = blk.shape
            out[row0 : row0 + r, col0 : col0 + c] = blk
            row0 += r
            col0 += c
        return out


def _free_map_matrix(
    A: TruncatedGradedAlgebra,
    dmat,
    src: FreeRealization,
    dst: FreeRealization,
    d: int,
) -> np.ndarray:
    """Matrix at internal degree d of the A-linear map with AElem entries
    dmat[k_dst][k_src]."""
    p = A.p
    src_basis = src.basis(d)
    dst_index = dst.index(d)
    out = np.zeros((len(dst_index), len(src_basis)), dtype=np.int64)
    # cache α_l · entry products per (k_dst, k_src, l)
    prod_cache: dict[tuple[int, int, int], tuple] = {}
    for col, (k, (l, mono)) in enumerate(src_basis):
        for kd in range(len(dst.gens)):
            entry = dmat[kd][k]
            if all(not f for f in entry):
                continue
            key = (kd, k, l)
            if key not in prod_cache:
                prod_cache[key] = A.elem_mul(A.gen_elem(l), entry)
            prod = prod_cache[key]
            for m, f in enumerate(prod):
                for mm, c in f.items():
                    b = (kd, (m, tuple(x + y for x, y in zip(mm, mono))))
                    out[dst_index[b], col] = (out[dst_index[b], col] + c) % p
    return out


@dataclass
class TruncatedResolution:
    """Front of a minimal graded free resolution of a framed module.

    free_gens[s] lists the generator degrees of the s-th free module; diffs[s]
    is the AElem matrix of F_{s+1} -> F_s; cover holds the step-0 generators
    as (degree, coordinate vector in M_degree)."""

    module: FramedModule
    free_gens: list[tuple[int, ...]]
    diffs: list
    cover: list[tuple[int, np.ndarray]]
    window: tuple[int, int]
    _realizations: dict = None
    _mat_cache: dict = None

    def realization(self, s: int) -> FreeRealization:
        if self._realizations is None:
            self._realizations = {}
        if s not in self._realizations:
            self._realizations[s] = FreeRealization(self.module.algebra, self.free_gens[s])
        return self._realizations[s]

    def cover_matrix(self, d: int, real_M: ModuleRealization) -> np.ndarray:
        F0 = self.realization(0)
        src = F0.basis(d)
        out = np.zeros((real_M.dim(d), len(src)), dtype=np.int64)
        for col, (k, (l, mono)) in enumerate(src):
            gdeg, gvec = self.cover[k]
            img = real_M.gen_matrix(l, gdeg) @ gvec % self.module.algebra.p
            img = real_M.mono_matrix(mono, gdeg + self.module.algebra.gen_degrees[l]) @ img
            out[:, col] = img % self.module.algebra.p
        return out

    def diff_matrix(self, s: int, d: int) -> np.ndarray:
        """Matrix of d_{s+1} : (F_{s+1})_d -> (F_s)_d."""
        if self._mat_cache is None:
            self._mat_cache = {}
        key = (s, d)
        if key not in self._mat_cache:
            A = self.module.algebra
            self._mat_cache[key] = _free_map_matrix(
                A, self.diffs[s], self.realization(s + 1), self.realization(s), d
            )
        return self._mat_cache[key]

    def length(self) -> int:
        return sum(1 for g in self.free_gens[1:] if g)

    def dd_is_zero(self) -> bool:
        """d∘d = 0 checked exactly at the level of AElem matrices."""
        A = self.module.algebra
        for s in range(len(self.diffs) - 1):
            hi = self.diffs[s]
            lo = self.diffs[s + 1]
            rows = len(self.free_gens[s])
            mids = len(self.free_gens[s + 1])
            cols = len(self.free_gens[s + 2])
            for r in range(rows):
                for c in range(cols):
                    acc = A.zero_elem()
                    for m in range(mids):
                        acc = A.elem_add(acc, A.elem_mul(hi[r][m], lo[m][c]))
                    if not A.elem_is_zero(acc):
                        return False
        return True

    def is_minimal(self) -> bool:
        """No differential entry carries a unit (degree-0) component."""
        for s, dmat in enumerate(self.diffs):
            gs_dst = self.free_gens[s]
            gs_src = self.free_gens[s + 1]
            for r, gd in enumerate(gs_dst):
                for c, gc in enumerate(gs_src):
                    if gc == gd and any(f for f in dmat[r][c]):
                        return False
        return True


def _hilbert_numerator_coeff(weights, dims: dict, d: int) -> int:
    """Coefficient d of dims(t) * prod_j (1 - t^{w_j})."""
    den = {0: 1}
    for w in weights:
        new = dict(den)
        for off, c in den.items():
            new[off + w] = new.get(off + w, 0) - c
        den = new
    return sum(c * dims.get(d - off, 0) for off, c in den.items())


def _select_new_generators(span: np.ndarray, cand: np.ndarray, p: int):
    """Columns of cand extending the column space of span, chosen by pivot
    order for reproducibility."""
    ncols = span.shape[1]
    if cand.shape[1] == 0:
        return []
    aug = np.concatenate([span, cand], axis=1) if ncols else cand
    _, piv = linalg.rref(aug, p)
    return [cand[:, c - ncols] for c in piv if c >= ncols]


def minimal_resolution(
    M: FramedModule, length: int = 2, window: tuple[int, int] | None = None
) -> TruncatedResolution:
    """Build the first `length` syzygy steps of the minimal graded free
    resolution, selecting generators degree by degree.

    Each step's generator list is complete: the scan stops when the R-rank of
    the kernel (known exactly from additivity over the R-split exact
    sequences) has been exhausted.
    """
    A = M.algebra
    p = A.p
    if not A.is_connected():
        raise AlgebraError("minimal resolutions require a connected algebra")
    real_M = ModuleRealization(M)
    if M.V.is_zero():
        return TruncatedResolution(M, [()], [], [], (0, 0))

    hi_guard = window[1] if window else A.D

    # step 0: minimal A-module generators of M, found inside framing degrees
    g_min = M.V.min_degree()
    cover: list[tuple[int, np.ndarray]] = []
    for d in M.V.degrees():
        span_cols = []
        for e in range(1, d - g_min + 1):
            if A.dim(e) == 0 or real_M.dim(d - e) == 0:
                continue
            for (l, mono) in A.basis(e):
                elem = tuple(
                    {mono: 1} if li == l else {} for li in range(A.num_gens)
                )
                span_cols.append(real_M.elem_matrix(elem, d - e))
        span = (
            np.concatenate(span_cols, axis=1)
            if span_cols
            else np.zeros((real_M.dim(d), 0), dtype=np.int64)
        )
        for vec in _select_new_generators(span, linalg.eye(real_M.dim(d)), p):
            cover.append((d, vec))
    free_gens = [tuple(d for d, _ in cover)]
    diffs = []
    res = TruncatedResolution(M, free_gens, diffs, cover, (g_min, hi_guard))

    rank_prev = GradedDims.rank(M.V)  # rank_R of the image of the current cover
    for step in range(length):
        src = res.realization(step)
        rank_src = A.num_gens * len(src.gens)
        rank_K = rank_src - rank_prev
        if rank_K < 0:
            raise AlgebraError("rank bookkeeping failed: module not R-free?")

        def map_at(d: int) -> np.ndarray:
            if step == 0:
                return res.cover_matrix(d, real_M)
            return res.diff_matrix(step - 1, d)

        new_gens: list[tuple[int, np.ndarray]] = []
        kernels: dict[int, np.ndarray] = {}
        kdims: dict[int, int] = {}
        found_rank = 0
        if rank_K > 0:
            d = min(src.gens)
            while found_rank < rank_K:
                if d > hi_guard:
                    raise WindowExhaustedError(
                        f"syzygy scan for step {step + 1} passed degree {hi_guard}; "
                        f"increase the truncation bound"
                    )
                K = linalg.kernel_basis(map_at(d), p)
                kernels[d] = K
                kdims[d] = K.shape[1]
                n_d = _hilbert_numerator_coeff(A.ring.weights, kdims, d)
                if n_d < 0 or found_rank + n_d > rank_K:
                    raise AlgebraError("kernel is not free over R: scan inconsistent")
                found_rank += n_d
                if K.shape[1]:
                    span_cols = []
                    for e in range(1, d - min(src.gens) + 1):
                        Klo = kernels.get(d - e)
                        if Klo is None or Klo.shape[1] == 0 or A.dim(e) == 0:
                            continue
                        for (l, mono) in A.basis(e):
                            elem = tuple(
                                {mono: 1} if li == l else {} for li in range(A.num_gens)
                            )
                            span_cols.append(src.elem_matrix(elem, d - e) @ Klo % p)
                    span = (
                        np.concatenate(span_cols, axis=1)
                        if span_cols
                        else np.zeros((src.dim(d), 0), dtype=np.int64)
                    )
                    for vec in _select_new_generators(span, K, p):
                        new_gens.append((d, vec))
                d += 1

        gens_next = tuple(d for d, _ in new_gens)
        dmat = [[None] * len(gens_next) for _ in range(len(src.gens))]
        for c, (d, vec) in enumerate(new_gens):
            basis = src.basis(d)
            cols = [
                [dict() for _ in range(A.num_gens)] for _ in range(len(src.gens))
            ]
            for pos, coeff in enumerate(vec):
                coeff = int(coeff) % p
                if not coeff:
                    continue
                k, (l, mono) = basis[pos]
                cur = cols[k][l].get(mono, 0)
                cols[k][l][mono] = (cur + coeff) % p
            for k in range(len(src.gens)):
                dmat[k][c] = tuple(cols[k])
        free_gens.append(gens_next)
        diffs.append(dmat)
        rank_prev = rank_K
        if not gens_next:
            # kernel is zero from here on: pad with zero modules
            for _ in range(step + 1, length):
                free_gens.append(())
                diffs.append([])
            break
    return res


def two_periodic_pattern(res: TruncatedResolution, from_step: int = 1):
    """Check that generator-degree patterns repeat with period 2 from the
    given step onward, with a consistent degree shift.  Returns the shift, or
    None when the pattern is not 2-periodic."""
    shift = None
    for s in range(from_step, len(res.free_gens) - 2):
        a = sorted(res.free_gens[s])
        b = sorted(res.free_gens[s + 2])
        if len(a) != len(b):
            return None
        if not a:
            continue
        offs = {y - x for x, y in zip(a, b)}
        if len(offs) != 1:
            return None
        off = offs.pop()
        if shift is None:
            shift = off
        elif shift != off:
            return None
    return shift


@dataclass
class ExtWindow:
    source: str | None
    target: str | None
    lo: int
    hi: int
    dims: list[int]
    field: int
    truncation: int

    def dim(self, d: int) -> int:
        if d < self.lo or d > self.hi:
            raise ValueError(f"degree {d} outside window [{self.lo},{self.hi}]")
        return self.dims[d - self.lo]

    def is_zero(self) -> bool:
        return not any(self.dims)

    def support(self) -> list[int]:
        return [self.lo + i for i, v in enumerate(self.dims) if v]

    def to_json_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "window": [self.lo, self.hi],
            "dims": list(self.dims),
            "field": self.field,
            "truncation": self.truncation,
        }


def default_ext_window(M: FramedModule, N: FramedModule) -> tuple[int, int]:
    """Window guaranteed to contain the finite support for isolated
    singularities: the symmetric band widened by the modules' degree offsets."""
    span = M.algebra.alpha + M.V.width() + N.V.width() + 2
    lo = N.V.min_degree() - M.V.max_degree() - span
    hi = N.V.max_degree() - M.V.min_degree() + span
    return (lo, hi)


def ext1_window(
    M: FramedModule, N: FramedModule, window: tuple[int, int] | None = None
) -> ExtWindow:
    """Dimensions of Ext^1_A(M, N) in each internal degree of the window,
    computed from the Hom complex of a two-step minimal resolution of M."""
    A = M.algebra
    p = A.p
    if N.algebra is not A:
        raise ValueError("Ext needs modules over the same algebra")
    if M.V.is_zero() or N.V.is_zero():
        lo, hi = window if window else (0, 0)
        return ExtWindow(M.name, N.name, lo, hi, [0] * (hi - lo + 1), p, A.D)
    if window is None:
        window = default_ext_window(M, N)
    lo, hi = window
    res = minimal_resolution(M, length=2)
    realN = ModuleRealization(N)
    g0, g1, g2 = res.free_gens[0], res.free_gens[1], res.free_gens[2]
    d1, d2 = res.diffs[0], res.diffs[1]
    dims = []
    for d in range(lo, hi + 1):
        dims1 = [realN.dim(g + d) for g in g1]
        total1 = sum(dims1)
        if total1 == 0:
            dims.append(0)
            continue
        off1 = np.cumsum([0] + dims1)
        # cocycle constraints: psi ∘ d2 = 0, one block row per F2 generator
        rows = sum(realN.dim(g + d) for g in g2)
        C = np.zeros((rows, total1), dtype=np.int64)
        row0 = 0
        for c2, gdeg2 in enumerate(g2):
            h = realN.dim(gdeg2 + d)
            if h:
                for j, gdeg1 in enumerate(g1):
                    entry = d2[j][c2]
                    if any(f for f in entry):
                        C[row0 : row0 + h, off1[j] : off1[j + 1]] = realN.elem_matrix(
                            entry, gdeg1 + d
                        )
            row0 += h
        cocycles = total1 - linalg.rank(C, p)
        # coboundaries: image of psi0 -> psi0 ∘ d1
        dims0 = [realN.dim(g + d) for g in g0]
        total0 = sum(dims0)
        off0 = np.cumsum([0] + dims0)
        B = np.zeros((total1, total0), dtype=np.int64)
        for j, gdeg1 in enumerate(g1):
            h = realN.dim(gdeg1 + d)
            if not h:
                continue
            for k, gdeg0 in enumerate(g0):
                entry = d1[k][j]
                if any(f for f in entry):
                    B[off1[j] : off1[j + 1], off0[k] : off0[k + 1]] = realN.elem_matrix(
                        entry, gdeg0 + d
                    )
        dims.append(cocycles - linalg.rank(B, p))
    return ExtWindow(M.name, N.name, lo, hi, dims, p, A.D)


def hom_zero(M: FramedModule, N: FramedModule) -> list:
    """Basis of the degree-0 A-linear maps M -> N, by the intertwiner linear
    system on degree-0 R-module maps (independent of any resolution)."""
    A = M.algebra
    p = A.p
    slots_M = M.slots
    slots_N = N.slots
    descriptors = []
    for t, (sdeg, _) in enumerate(slots_N):
        for s, (rdeg, _) in enumerate(slots_M):
            for mono in A.ring.monomial_basis(rdeg - sdeg):
                descriptors.append((t, s, mono))
    if not descriptors:
        return []
    # constraint coefficients: for each generator i, entry (t, s), monomial
    rows_index: dict = {}
    rows: list = []

    def row_of(key):
        if key not in rows_index:
            rows_index[key] = len(rows)
            rows.append(key)
        return rows_index[key]

    cols = []
    for t0, s0, mono0 in descriptors:
        col: dict[int, int] = {}
        for i in range(1, A.num_gens):
            actM = M.actions[i]
            actN = N.actions[i]
            # (psi ∘ actM)_{t0, s} picks psi[t0][s0] * actM[s0][s]
            for s in range(len(slots_M)):
                f = actM[s0][s]
                for mm, c in f.items():
                    mono = tuple(x + y for x, y in zip(mono0, mm))
                    r = row_of((i, t0, s, mono))
                    col[r] = (col.get(r, 0) + c) % p
            # (actN ∘ psi)_{t, s0} picks actN[t][t0] * psi[t0][s0]
            for t in range(len(slots_N)):
                f = actN[t][t0]
                for mm, c in f.items():
                    mono = tuple(x + y for x, y in zip(mono0, mm))
                    r = row_of((i, t, s0, mono))
                    col[r] = (col.get(r, 0) - c) % p
        cols.append(col)
    mat = np.zeros((len(rows), len(descriptors)), dtype=np.int64)
    for cidx, col in enumerate(cols):
        for r, v in col.items():
            mat[r, cidx] = v
    ker = linalg.kernel_basis(mat, p)
    out = []
    for k in range(ker.shape[1]):
        psi = pm_zeros(len(slots_N), len(slots_M))
        for b, (t, s, mono) in enumerate(descriptors):
            c = int(ker[b, k])
            if c:
                cur = psi[t][s].get(mono, 0)
                psi[t][s][mono] = (cur + c) % p
        out.append(psi)
    return out


def dualize(M: FramedModule) -> FramedModule:
    """R-dual M ↦ Hom_R(M, R): framing degrees negate, action matrices
    transpose with entries intact."""
    A = M.algebra
    if not A.commutative:
        warnings.warn(
            "dualizing over a noncommutative algebra produces a right module; "
            "interpreting the transpose as a left action",
            stacklevel=2,
        )
    Vd = M.V.dual()
    slots_d = framing_slots(Vd)
    orig_index = {s: i for i, s in enumerate(M.slots)}
    actions = {}
    n = len(slots_d)
    for i in range(1, A.num_gens):
        mat = pm_zeros(n, n)
        for t, (dt, ut) in enumerate(slots_d):
            for s, (ds, us) in enumerate(slots_d):
                # dual entry (t, s) = original entry (source (-dt), target (-ds))
                src = orig_index[(-dt, ut)]
                tgt = orig_index[(-ds, us)]
                f = M.actions[i][tgt][src]
                if f:
                    mat[t][s] = dict(f)
        actions[i] = mat
    name = f"{M.name}^v" if M.name else None
    # over a noncommutative algebra the transpose is a module over the
    # opposite algebra; the caller was warned, so skip left-module validation
    return make_framed_module(A, Vd, actions, name=name, check=A.commutative)


def ext1_swap_check(
    M: FramedModule, N: FramedModule, window: tuple[int, int] | None = None
) -> bool:
    """Dimensionwise check of Ext^1(M,N)_d = Ext^1(N^dual, M^dual)_d."""
    if window is None:
        window = default_ext_window(M, N)
    w1 = ext1_window(M, N, window)
    w2 = ext1_window(dualize(N), dualize(M), window)
    return w1.dims == w2.dims
