"""
Sparse multivariate polynomials with exact rational coefficients, and
fraction-free determinants of polynomial matrices.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import BadColumnList


def _coerce_coeff(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not rational")


class MultiPoly:
    """Polynomial over Q in an ordered tuple of named variables.

    Terms are kept as ``{exponent tuple: Fraction}`` without zero entries.
    Operands over different variable lists are merged onto the union.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ValueError("exponent length does not match variable count")
            c = _coerce_coeff(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    # construction helpers

    @classmethod
    def constant(cls, variables, c) -> "MultiPoly":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, variables, name: str) -> "MultiPoly":
        variables = tuple(variables)
        exp = tuple(1 if v == name else 0 for v in variables)
        if sum(exp) != 1:
            raise KeyError(name)
        return cls(variables, {exp: 1})

    # structure

    def is_zero(self) -> bool:
        return not self.terms

    def _align(self, other: "MultiPoly"):
        if self.variables == other.variables:
            return self, other
        merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.extend(merged), other.extend(merged)

    def extend(self, variables) -> "MultiPoly":
        """Re-express over a variable list containing all current variables."""
        variables = tuple(variables)
        pos = [variables.index(v) for v in self.variables]
        out = {}
        for exp, c in self.terms.items():
            e = [0] * len(variables)
            for p, k in zip(pos, exp):
                e[p] = k
            out[tuple(e)] = c
        return MultiPoly(variables, out)

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            return self._align(other)
        if isinstance(other, (int, Fraction)):
            return self, MultiPoly.constant(self.variables, other)
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        lifted = self._lift(other)
        if lifted is NotImplemented:
            return NotImplemented
        a, b = lifted
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(a.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        lifted = self._lift(other)
        if lifted is NotImplemented:
            return NotImplemented
        a, b = lifted
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        lifted = self._lift(other)
        if lifted is NotImplemented:
            return NotImplemented
        a, b = lifted
        out = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(a.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        result = MultiPoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        lifted = self._lift(other) if isinstance(other, (MultiPoly, int, Fraction)) else NotImplemented
        if lifted is NotImplemented:
            return NotImplemented
        a, b = lifted
        return (a - b).is_zero()

    def __hash__(self):
        return hash(frozenset(self.trimmed().terms.items()))

    # calculus and evaluation

    def diff(self, name: str) -> "MultiPoly":
        if name not in self.variables:
            return MultiPoly(self.variables)
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return MultiPoly(self.variables, out)

    def subs(self, values: Mapping) -> "MultiPoly":
        """Substitute numbers or polynomials for some variables."""
        result = MultiPoly(self.variables)
        idx = {v: i for i, v in enumerate(self.variables)}
        replaced = [idx[v] for v in values if v in idx]
        power_cache = {}
        for e, c in self.terms.items():
            keep = list(e)
            term = MultiPoly.constant(self.variables, c)
            for i in replaced:
                k = e[i]
                keep[i] = 0
                if k:
                    key = (i, k)
                    if key not in power_cache:
                        val = values[self.variables[i]]
                        if not isinstance(val, MultiPoly):
                            val = MultiPoly.constant(self.variables, val)
                        power_cache[key] = val ** k
                    term = term * power_cache[key]
            term = term * MultiPoly(self.variables, {tuple(keep): 1})
            result = result + term
        return result

    def evaluate(self, values: Mapping):
        """Value at a full assignment; exact for rational inputs."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(self.variables, e):
                if k:
                    t = t * values[v] ** k
            total = total + t
        return total

    # degrees

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degrees_in(self, names) -> set:
        """Set of total degrees in the given subset of variables across terms."""
        idx = [self.variables.index(v) for v in names if v in self.variables]
        return {sum(e[i] for i in idx) for e in self.terms}

    def is_homogeneous_in(self, names) -> bool:
        return len(self.degrees_in(names)) <= 1

    def trimmed(self) -> "MultiPoly":
        """Drop variables that do not occur."""
        used = [i for i in range(len(self.variables)) if any(e[i] for e in self.terms)]
        return MultiPoly([self.variables[i] for i in used],
                         {tuple(e[i] for i in used): c for e, c in self.terms.items()})

    def leading_term(self):
        e = max(self.terms)
        return e, self.terms[e]

    # division

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        """Quotient of an exact division; raises ArithmeticError otherwise."""
        a, b = self._align(other)
        if b.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e, lead_c = b.leading_term()
        rem = dict(a.terms)
        quot = {}
        while rem:
            e = max(rem)
            c = rem[e]
            diff_e = tuple(x - y for x, y in zip(e, lead_e))
            if min(diff_e) < 0:
                raise ArithmeticError("division is not exact")
            qc = c / lead_c
            quot[diff_e] = qc
            for be, bc in b.terms.items():
                te = tuple(x + y for x, y in zip(be, diff_e))
                s = rem.get(te, Fraction(0)) - qc * bc
                if s:
                    rem[te] = s
                else:
                    rem.pop(te, None)
        return MultiPoly(a.variables, quot)

    # display

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}**{k}" for v, k in zip(self.variables, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def symbols(variables, names=None) -> list:
    """Variables of a ring as MultiPolys, e.g. ``x1, x2 = symbols(V, ["x1", "x2"])``."""
    variables = tuple(variables)
    return [MultiPoly.var(variables, n) for n in (names or variables)]


def _check_square(rows):
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise BadColumnList("matrix is not square")
    return n


def det_bareiss(rows) -> MultiPoly:
    """Fraction-free Gaussian elimination (Bareiss) with row pivoting."""
    n = _check_square(rows)
    if n == 0:
        raise BadColumnList("empty matrix")
    a = [list(r) for r in rows]
    variables = a[0][0].variables
    sign = 1
    prev = MultiPoly.constant(variables, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return MultiPoly(variables)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def det_laplace(rows) -> MultiPoly:
    """Cofactor expansion along rows, memoized on the remaining column set."""
    n = _check_square(rows)
    variables = rows[0][0].variables
    cache = {}

    def rec(r: int, cols: tuple) -> MultiPoly:
        if r == n:
            return MultiPoly.constant(variables, 1)
        if cols in cache:
            return cache[cols]
        total = MultiPoly(variables)
        for pos, c in enumerate(cols):
            entry = rows[r][c]
            if entry.is_zero():
                continue
            sub = rec(r + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            total = total + term if pos % 2 == 0 else total - term
        cache[cols] = total
        return total

    return rec(0, tuple(range(n)))


def det_fraction(rows) -> Fraction:
    """Determinant of a matrix of rationals by Gaussian elimination."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def minor(matrix, column_list, method: str = "bareiss") -> MultiPoly:
    """Determinant of the square submatrix on the given 1-based columns."""
    cols = list(column_list)
    n_rows = len(matrix)
    n_cols = len(matrix[0])
    if len(cols) != n_rows:
        raise BadColumnList(f"need {n_rows} columns, got {len(cols)}")
    if len(set(cols)) != len(cols):
        raise BadColumnList(f"repeated column in {cols}")
    if any(not 1 <= c <= n_cols for c in cols):
        raise BadColumnList(f"column out of range in {cols}")
    sub = [[row[c - 1] for c in cols] for row in matrix]
    return det_bareiss(sub) if method == "bareiss" else det_laplace(sub)
