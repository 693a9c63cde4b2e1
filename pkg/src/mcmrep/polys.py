"""Sparse polynomials over a weighted ring with coefficients in F_p.

A polynomial is a plain dict mapping exponent tuples to nonzero coefficients
in [1, p).  Matrices of polynomials are lists of row lists.  Everything here
constructs fresh dicts, so polynomials can be shared freely.

The string grammar used by problem files (see docs/poly-grammar.md):

    poly   := term (('+' | '-') term)*
    term   := ('-')? factor ('*' factor)*
    factor := INT | VAR ('^' INT)?
"""

import re

from .graded import WeightedPolyRing

Poly = dict

__all__ = [
    "Poly",
    "PolyParseError",
    "homogeneous_degree",
    "p_add",
    "p_const",
    "p_eq",
    "p_is_zero",
    "p_mul",
    "p_neg",
    "p_scale",
    "p_sub",
    "p_var",
    "parse_poly",
    "pm_add",
    "pm_eq",
    "pm_eye",
    "pm_is_zero",
    "pm_mul",
    "pm_scale",
    "pm_sub",
    "pm_transpose",
    "pm_zeros",
    "poly_str",
]


def p_const(c: int, nvars: int, p: int) -> Poly:
    c %= p
    return {(0,) * nvars: c} if c else {}


def p_var(ring: WeightedPolyRing, j: int, p: int) -> Poly:
    e = [0] * ring.num_vars
    e[j] = 1
    return {tuple(e): 1 % p}


def p_is_zero(f: Poly) -> bool:
    return not f


def p_eq(f: Poly, g: Poly) -> bool:
    return f == g


def p_add(f: Poly, g: Poly, p: int) -> Poly:
    out = dict(f)
    for m, c in g.items():
        v = (out.get(m, 0) + c) % p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def p_neg(f: Poly, p: int) -> Poly:
    return {m: (-c) % p for m, c in f.items()}


def p_sub(f: Poly, g: Poly, p: int) -> Poly:
    return p_add(f, p_neg(g, p), p)


def p_scale(f: Poly, c: int, p: int) -> Poly:
    c %= p
    if c == 0:
        return {}
    return {m: (v * c) % p for m, v in f.items()}


def p_mul(f: Poly, g: Poly, p: int) -> Poly:
    out: Poly = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            v = (out.get(m, 0) + c1 * c2) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def homogeneous_degree(ring: WeightedPolyRing, f: Poly):
    """Weighted degree of a homogeneous polynomial; None for 0.

    Raises ValueError on inhomogeneous input.
    """
    deg = None
    for m in f:
        d = ring.monomial_degree(m)
        if deg is None:
            deg = d
        elif d != deg:
            raise ValueError(f"inhomogeneous polynomial: degrees {deg} and {d}")
    return deg


def poly_str(f: Poly, ring: WeightedPolyRing) -> str:
    if not f:
        return "0"
    terms = []
    for m in sorted(f, reverse=True):
        c = f[m]
        vars_part = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(ring.names, m)
            if e
        )
        if not vars_part:
            terms.append(str(c))
        elif c == 1:
            terms.append(vars_part)
        else:
            terms.append(f"{c}*{vars_part}")
    return " + ".join(terms)


class PolyParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*([0-9]+|[A-Za-z_][A-Za-z_0-9]*|\+|\-|\*|\^)")


def _tokenize(s: str):
    out, pos = [], 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            if s[pos:].strip():
                raise PolyParseError(f"unexpected character {s[pos:].strip()[0]!r} in {s!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_poly(s: str, ring: WeightedPolyRing, p: int) -> Poly:
    """Parse the minimal polynomial grammar over the ring's variables."""
    tokens = _tokenize(s)
    var_index = {name: j for j, name in enumerate(ring.names)}
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def factor() -> Poly:
        tok = take()
        if tok is None:
            raise PolyParseError(f"unexpected end of input in {s!r}")
        if tok.isdigit():
            return p_const(int(tok), ring.num_vars, p)
        if tok in var_index:
            e = 1
            if peek() == "^":
                take()
                exp_tok = take()
                if exp_tok is None or not exp_tok.isdigit():
                    raise PolyParseError(f"expected integer exponent in {s!r}")
                e = int(exp_tok)
            expt = [0] * ring.num_vars
            expt[var_index[tok]] = e
            return {tuple(expt): 1 % p}
        raise PolyParseError(f"unknown token {tok!r} in {s!r} (variables: {ring.names})")

    def term() -> Poly:
        sign = 1
        while peek() == "-":
            take()
            sign = -sign
        f = factor()
        while peek() == "*":
            take()
            f = p_mul(f, factor(), p)
        return p_scale(f, sign, p)

    result = term()
    while peek() in ("+", "-"):
        op = take()
        t = term()
        result = p_add(result, t if op == "+" else p_neg(t, p), p)
    if pos != len(tokens):
        raise PolyParseError(f"trailing tokens {tokens[pos:]} in {s!r}")
    return result


# --- matrices of polynomials -------------------------------------------------

PolyMat = list


def pm_zeros(rows: int, cols: int) -> PolyMat:
    return [[{} for _ in range(cols)] for _ in range(rows)]


def pm_eye(n: int, nvars: int, p: int) -> PolyMat:
    out = pm_zeros(n, n)
    for i in range(n):
        out[i][i] = p_const(1, nvars, p)
    return out


def pm_add(a: PolyMat, b: PolyMat, p: int) -> PolyMat:
    return [[p_add(x, y, p) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pm_sub(a: PolyMat, b: PolyMat, p: int) -> PolyMat:
    return [[p_sub(x, y, p) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pm_mul(a: PolyMat, b: PolyMat, p: int) -> PolyMat:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = pm_zeros(rows, cols)
    for i in range(rows):
        for k in range(inner):
            f = a[i][k]
            if not f:
                continue
            row_b = b[k]
            for j in range(cols):
                if row_b[j]:
                    out[i][j] = p_add(out[i][j], p_mul(f, row_b[j], p), p)
    return out


def pm_scale(f: Poly, a: PolyMat, p: int) -> PolyMat:
    return [[p_mul(f, x, p) for x in row] for row in a]


def pm_transpose(a: PolyMat) -> PolyMat:
    if not a:
        return []
    return [[dict(a[i][j]) for i in range(len(a))] for j in range(len(a[0]))]


def pm_is_zero(a: PolyMat) -> bool:
    return all(not f for row in a for f in row)


def pm_eq(a: PolyMat, b: PolyMat) -> bool:
    return a == b
