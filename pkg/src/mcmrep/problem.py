"""Problem files: TOML descriptions of an algebra, framings, and modules.

Generator indices are 1-based in files (generator 1 is the unit); internally
everything is 0-based.  Polynomial strings follow the grammar documented in
docs/poly-grammar.md.  The algebra is given either by structure constants
over a declared ring, or by a hypersurface quotient presentation that runs
through the converter.
"""

import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from . import linalg
from .algebra import (
    AlgebraError,
    AlgebraInput,
    FramedModule,
    NotAModuleError,
    QuotientContext,
    RelationPresentation,
    TruncatedGradedAlgebra,
    algebra_from_quotient,
    build_truncated_algebra,
    framing_slots,
    make_framed_module,
)
from .graded import GradedDims, WeightedPolyRing
from .polys import PolyParseError, parse_poly, poly_str

__all__ = ["Problem", "ProblemError", "dump_problem_toml", "parse_problem"]


class ProblemError(ValueError):
    pass


@dataclass
class Problem:
    path: str
    p: int
    algebra: TruncatedGradedAlgebra
    qctx: QuotientContext | None
    framings: dict[str, GradedDims]
    modules: dict[str, FramedModule]

    def framing(self, name: str) -> GradedDims:
        if name not in self.framings:
            raise ProblemError(
                f"unknown framing {name!r}; declared: {sorted(self.framings)}"
            )
        return self.framings[name]

    def module(self, name: str) -> FramedModule:
        if name not in self.modules:
            raise ProblemError(
                f"unknown module {name!r}; declared: {sorted(self.modules)}"
            )
        return self.modules[name]


def _require(table: dict, key: str, context: str):
    if key not in table:
        raise ProblemError(f"missing key {key!r} in {context}")
    return table[key]


def parse_problem(path: str) -> Problem:
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except OSError as exc:
        raise ProblemError(f"cannot read problem file: {exc}") from exc
    except _toml.TOMLDecodeError as exc:
        raise ProblemError(f"malformed TOML in {path}: {exc}") from exc

    field = _require(data, "field", path)
    p = int(_require(field, "p", "[field]"))
    try:
        linalg.check_prime(p)
    except ValueError as exc:
        raise ProblemError(str(exc)) from exc

    alg_table = _require(data, "algebra", path)
    D = None
    if "truncation" in data and "D" in data["truncation"]:
        D = int(data["truncation"]["D"])

    qctx = None
    if "quotient" in alg_table:
        q = alg_table["quotient"]
        S = WeightedPolyRing.make(
            _require(q, "ambient_weights", "[algebra.quotient]"),
            tuple(_require(q, "ambient_names", "[algebra.quotient]")),
        )
        try:
            ideal = [parse_poly(s, S, p) for s in _require(q, "ideal", "[algebra.quotient]")]
            norm = [
                parse_poly(s, S, p)
                for s in _require(q, "normalization", "[algebra.quotient]")
            ]
        except PolyParseError as exc:
            raise ProblemError(f"bad polynomial in [algebra.quotient]: {exc}") from exc
        r_names = tuple(q["normalization_names"]) if "normalization_names" in q else None
        try:
            A, qctx = algebra_from_quotient(
                S,
                ideal,
                norm,
                p,
                commutative=bool(alg_table.get("commutative", True)),
                isolated_singularity=bool(alg_table.get("isolated_singularity", False)),
                r_names=r_names,
                D=D,
            )
        except AlgebraError as exc:
            raise ProblemError(f"quotient presentation rejected: {exc}") from exc
    else:
        ring_table = _require(data, "ring", path)
        ring = WeightedPolyRing.make(
            _require(ring_table, "weights", "[ring]"),
            tuple(ring_table["names"]) if "names" in ring_table else None,
        )
        shifts = tuple(int(a) for a in _require(alg_table, "generator_shifts", "[algebra]"))
        g = len(shifts)
        sc_table = _require(alg_table, "structure_constants", "[algebra]")
        one = {(0,) * ring.num_vars: 1 % p}
        sc = [[None] * g for _ in range(g)]
        for i in range(g):
            for j in range(g):
                if i == 0 or j == 0:
                    other = j if i == 0 else i
                    sc[i][j] = tuple(dict(one) if l == other else {} for l in range(g))
        for key, val in sc_table.items():
            try:
                si, sj = key.split(",")
                i, j = int(si) - 1, int(sj) - 1
            except ValueError as exc:
                raise ProblemError(
                    f"structure constant key {key!r} must be 'i,j' with 1-based indices"
                ) from exc
            if not (1 <= i < g and 1 <= j < g):
                raise ProblemError(
                    f"structure constant key {key!r} names a non-interior generator"
                )
            if len(val) != g:
                raise ProblemError(
                    f"expansion for pair {key!r} must list {g} coefficients"
                )
            try:
                sc[i][j] = tuple(parse_poly(s, ring, p) for s in val)
            except PolyParseError as exc:
                raise ProblemError(f"bad polynomial for pair {key!r}: {exc}") from exc
        for i in range(1, g):
            for j in range(1, g):
                if sc[i][j] is None:
                    raise ProblemError(
                        f"missing structure constants for generator pair ({i + 1},{j + 1})"
                    )
        relations = None
        if "relations" in alg_table:
            r = alg_table["relations"]
            b_shifts = tuple(int(b) for b in _require(r, "b_shifts", "[algebra.relations]"))
            tau_rows = _require(r, "tau", "[algebra.relations]")
            if len(tau_rows) != g:
                raise ProblemError("[algebra.relations] tau must have one row per generator")
            try:
                tau = [[parse_poly(s, ring, p) for s in row] for row in tau_rows]
            except PolyParseError as exc:
                raise ProblemError(f"bad polynomial in relations: {exc}") from exc
            relations = RelationPresentation(b_shifts, tau)
        inp = AlgebraInput(
            ring=ring,
            p=p,
            gen_shifts=shifts,
            structure_constants=tuple(tuple(row) for row in sc),
            commutative=bool(alg_table.get("commutative", True)),
            isolated_singularity=bool(alg_table.get("isolated_singularity", False)),
            relations=relations,
        )
        try:
            A = build_truncated_algebra(inp, D=D)
        except AlgebraError as exc:
            raise ProblemError(f"algebra rejected: {exc}") from exc

    framings: dict[str, GradedDims] = {}
    for name, table in data.get("framings", {}).items():
        try:
            framings[name] = GradedDims.make({int(k): int(v) for k, v in table.items()})
        except ValueError as exc:
            raise ProblemError(f"framing {name!r}: {exc}") from exc

    modules: dict[str, FramedModule] = {}
    for name, table in data.get("modules", {}).items():
        fr_name = _require(table, "framing", f"[modules.{name}]")
        V = framings.get(fr_name)
        if V is None:
            raise ProblemError(f"module {name!r} references unknown framing {fr_name!r}")
        n = len(framing_slots(V))
        actions = {}
        for key, rows in table.get("action", {}).items():
            i = int(key) - 1
            if not (1 <= i < A.num_gens):
                raise ProblemError(
                    f"module {name!r}: action key {key!r} is not an interior generator"
                )
            if len(rows) != n or any(len(row) != n for row in rows):
                raise ProblemError(
                    f"module {name!r}: action matrix for generator {key} must be {n}x{n}"
                )
            try:
                actions[i] = [[parse_poly(s, A.ring, p) for s in row] for row in rows]
            except PolyParseError as exc:
                raise ProblemError(f"module {name!r}: {exc}") from exc
        try:
            modules[name] = make_framed_module(A, V, actions, name=name)
        except NotAModuleError as exc:
            raise ProblemError(f"module {name!r} rejected: {exc}") from exc

    return Problem(path=path, p=p, algebra=A, qctx=qctx, framings=framings, modules=modules)


# -- emission (used by `ade --emit`) ------------------------------------------


def dump_problem_toml(
    p: int,
    A: TruncatedGradedAlgebra,
    framings: dict[str, GradedDims],
    modules: dict[str, FramedModule],
    qctx: QuotientContext | None = None,
    header: str | None = None,
) -> str:
    """Serialize an algebra with framings and modules into the problem format.
    Emits the structure-constant presentation (the canonical interchange form)
    plus the quotient presentation as a comment trail when available."""
    lines = []
    if header:
        for h in header.splitlines():
            lines.append(f"# {h}")
    lines.append("[field]")
    lines.append(f"p = {p}")
    lines.append("")
    lines.append("[ring]")
    lines.append(f"weights = [{', '.join(str(w) for w in A.ring.weights)}]")
    names = ", ".join(f'"{nm}"' for nm in A.ring.names)
    lines.append(f"names = [{names}]")
    lines.append("")
    lines.append("[algebra]")
    lines.append(f"generator_shifts = [{', '.join(str(a) for a in A.gen_shifts)}]")
    lines.append(f"commutative = {'true' if A.commutative else 'false'}")
    lines.append(
        f"isolated_singularity = {'true' if A.isolated_singularity else 'false'}"
    )
    if qctx is not None:
        lines.append(f"# quotient presentation: f = {poly_str(qctx.f, qctx.S)} over "
                     f"S with weights {qctx.S.weights}")
    lines.append("")
    lines.append("[algebra.structure_constants]")
    sc = A.input.structure_constants
    for i in range(1, A.num_gens):
        for j in range(1, A.num_gens):
            coeffs = ", ".join(f'"{poly_str(c, A.ring)}"' for c in sc[i][j])
            lines.append(f'"{i + 1},{j + 1}" = [{coeffs}]')
    lines.append("")
    lines.append("[truncation]")
    lines.append(f"D = {A.D}")
    lines.append("")
    lines.append("[framings]")
    for name, V in framings.items():
        inner = ", ".join(f'"{d}" = {nd}' for d, nd in V.dims)
        lines.append(f"{name} = {{ {inner} }}")
    for name, M in modules.items():
        lines.append("")
        lines.append(f"[modules.{name}]")
        fr = next(fn for fn, V in framings.items() if V == M.V)
        lines.append(f'framing = "{fr}"')
        lines.append(f"[modules.{name}.action]")
        for i in sorted(M.actions):
            rows = []
            for row in M.actions[i]:
                rows.append("[" + ", ".join(f'"{poly_str(f, A.ring)}"' for f in row) + "]")
            lines.append(f'"{i + 1}" = [{", ".join(rows)}]')
    lines.append("")
    return "\n".join(lines)
