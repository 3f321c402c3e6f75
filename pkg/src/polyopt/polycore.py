"""Sparse multivariate polynomials over exact rationals or float64.

A polynomial is a map from exponent tuples to coefficients.  Two coefficient
domains are supported: exact (``fractions.Fraction``) for every symbolic
construction, and float for numerical post-processing.  Values are immutable
once built.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

# degree of the zero polynomial
ZERO_DEGREE = -1


# ---------------------------------------------------------------------------
# monomial orders


def grevlex_key(e: Sequence[int]) -> tuple:
    """Sort key: larger key means larger monomial in graded reverse lex."""
    return (sum(e), tuple(-k for k in reversed(e)))


def lex_key(e: Sequence[int]) -> tuple:
    return tuple(e)


class MonomialOrder:
    """A total monomial order.

    ``MonomialOrder.grevlex()`` is the default.  ``MonomialOrder.block`` builds
    a product order: monomials are compared by grevlex on the first block of
    variables, ties broken by grevlex on the next block, and so on.  Any
    variable not listed is appended to the last block.
    """

    def __init__(self, name: str, blocks: tuple[tuple[int, ...], ...] = ()):
        if name not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {name!r}")
        self.name = name
        self.blocks = blocks

    @classmethod
    def grevlex(cls) -> "MonomialOrder":
        return cls("grevlex")

    @classmethod
    def lex(cls) -> "MonomialOrder":
        return cls("lex")

    @classmethod
    def block(cls, *blocks: Sequence[int]) -> "MonomialOrder":
        return cls("block", tuple(tuple(b) for b in blocks))

    def key(self, e: Sequence[int]) -> tuple:
        if self.name == "grevlex":
            return grevlex_key(e)
        if self.name == "lex":
            return lex_key(e)
        return tuple(grevlex_key([e[i] for i in blk]) for blk in self.blocks)

    def eliminates(self, variables: Iterable[int]) -> bool:
        """True if the listed variables are exactly the leading blocks of this order."""
        want = set(variables)
        if not want:
            return True
        if self.name == "lex":
            return want == set(range(len(want)))
        if self.name != "block":
            return False
        seen: set[int] = set()
        for blk in self.blocks:
            seen |= set(blk)
            if seen == want:
                return True
            if not seen <= want:
                return False
        return False

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, MonomialOrder) and self.name == other.name
                and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.name, self.blocks))

    def __repr__(self) -> str:
        if self.name == "block":
            return f"MonomialOrder.block{self.blocks}"
        return f"MonomialOrder.{self.name}()"


GREVLEX = MonomialOrder.grevlex()


def monomials_of_degree(n: int, d: int) -> Iterator[Exponent]:
    """All exponent tuples of total degree exactly ``d`` in ``n`` variables."""
    if n == 0:
        if d == 0:
            yield ()
        return
    for bars in itertools.combinations(range(d + n - 1), n - 1):
        prev = -1
        e = []
        for b in bars:
            e.append(b - prev - 1)
            prev = b
        e.append(d + n - 2 - prev)
        yield tuple(e)


def monomial_basis(n: int, t: int, order: MonomialOrder = GREVLEX) -> list[Exponent]:
    """Monomials of degree <= t, by increasing degree and decreasing order within a degree."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    out: list[Exponent] = []
    for d in range(t + 1):
        out.extend(sorted(monomials_of_degree(n, d), key=order.key, reverse=True))
    return out


def add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# polynomials


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    raise TypeError(f"exact polynomial needs an int or Fraction coefficient, got {type(c).__name__}")


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables.

    ``exact=True`` stores ``Fraction`` coefficients, ``exact=False`` stores
    floats.  Mixing domains in arithmetic raises ``TypeError``; use
    :meth:`to_float` to convert.
    """

    __slots__ = ("nvars", "exact", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None,
                 exact: bool = True):
        self.nvars = nvars
        self.exact = exact
        clean: dict[Exponent, object] = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
            c = _as_fraction(c) if exact else float(c)
            if c != 0:
                clean[tuple(int(k) for k in e)] = c
        self._terms = clean
        self._hash = None

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c=1, exact: bool = True) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c}, exact)

    @classmethod
    def zero(cls, nvars: int, exact: bool = True) -> "Polynomial":
        return cls(nvars, {}, exact)

    @classmethod
    def variable(cls, nvars: int, i: int, exact: bool = True) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1}, exact)

    @classmethod
    def monomial(cls, e: Exponent, c=1, exact: bool = True) -> "Polynomial":
        return cls(len(e), {tuple(e): c}, exact)

    @classmethod
    def from_vector(cls, basis: Sequence[Exponent], coeffs: Sequence[float],
                    nvars: int | None = None) -> "Polynomial":
        """Float polynomial with coefficient ``coeffs[k]`` on monomial ``basis[k]``."""
        nv = len(basis[0]) if nvars is None else nvars
        terms: dict[Exponent, float] = {}
        for e, c in zip(basis, coeffs):
            terms[e] = terms.get(e, 0.0) + float(c)
        return cls(nv, terms, exact=False)

    # -- basic queries -------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self) -> list[Exponent]:
        return list(self._terms)

    def coefficient(self, e: Exponent):
        return self._terms.get(tuple(e), Fraction(0) if self.exact else 0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return ZERO_DEGREE
        return max(sum(e) for e in self._terms)

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return ZERO_DEGREE
        return max(e[i] for e in self._terms)

    def variables_used(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    def leading_exponent(self, order: MonomialOrder = GREVLEX) -> Exponent:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self._terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder = GREVLEX):
        return self._terms[self.leading_exponent(order)]

    # -- domain handling -----------------------------------------------------
    def to_float(self) -> "Polynomial":
        if not self.exact:
            return self
        return Polynomial(self.nvars, {e: float(c) for e, c in self._terms.items()}, exact=False)

    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if other.exact != self.exact:
            raise TypeError("cannot mix exact and float polynomials; convert with to_float()")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if self.exact and isinstance(other, (float, np.floating)):
            raise TypeError("cannot combine an exact polynomial with a float scalar")
        return Polynomial.constant(self.nvars, other, self.exact)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.nvars, out, self.exact)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()}, self.exact)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            if self.exact:
                c = _as_fraction(other)
            else:
                c = float(other)
            return Polynomial(self.nvars, {e: v * c for e, v in self._terms.items()}, self.exact)
        self._check(other)
        out: dict[Exponent, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, out, self.exact)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Polynomial":
        if isinstance(c, Polynomial):
            raise TypeError("polynomial division is not supported; use groebner.reduce")
        if self.exact:
            return self * (1 / _as_fraction(c))
        return self * (1.0 / float(c))

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Polynomial.constant(self.nvars, 1, self.exact)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, e: Exponent, c=1) -> "Polynomial":
        return Polynomial(self.nvars, {add_exponents(m, e): v * c for m, v in self._terms.items()},
                          self.exact)

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return (self.nvars == other.nvars and self.exact == other.exact
                    and self._terms == other._terms)
        if isinstance(other, (int, Fraction, float)):
            return self._terms == ({(0,) * self.nvars: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.exact, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation ----------------------------------------------
    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to variable ``i``."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        out: dict[Exponent, object] = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                d = list(e)
                d[i] = k - 1
                out[tuple(d)] = c * k
        return Polynomial(self.nvars, out, self.exact)

    def gradient(self, variables: Iterable[int] | None = None) -> list["Polynomial"]:
        idx = range(self.nvars) if variables is None else variables
        return [self.diff(i) for i in idx]

    def __call__(self, point):
        return evaluate(self, point)

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Float evaluation at each row of ``points``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.nvars:
            raise ValueError("point dimension does not match variable count")
        if not self._terms:
            return np.zeros(len(pts))
        exps = np.array(list(self._terms), dtype=int)
        coef = np.array([float(c) for c in self._terms.values()])
        vals = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        return vals @ coef

    # -- structural helpers ----------------------------------------------------
    def embed(self, nvars: int, positions: Sequence[int]) -> "Polynomial":
        """Map variable ``i`` to variable ``positions[i]`` of a larger space."""
        out = {}
        for e, c in self._terms.items():
            d = [0] * nvars
            for i, k in enumerate(e):
                d[positions[i]] += k
            out[tuple(d)] = c
        return Polynomial(nvars, out, self.exact)

    def restrict(self, keep: Sequence[int]) -> "Polynomial":
        """Drop variables not in ``keep``; the polynomial must not involve them."""
        keep = list(keep)
        drop = set(range(self.nvars)) - set(keep)
        if self.variables_used() & drop:
            raise ValueError("polynomial involves variables outside the kept set")
        return Polynomial(len(keep), {tuple(e[i] for i in keep): c for e, c in self._terms.items()},
                          self.exact)

    def primitive(self) -> "Polynomial":
        """Exact polynomial scaled to coprime integer coefficients with positive leading coefficient."""
        if not self.exact or not self._terms:
            return self
        den = reduce(math.lcm, (c.denominator for c in self._terms.values()))
        nums = [int(c * den) for c in self._terms.values()]
        g = reduce(math.gcd, nums)
        scale = Fraction(den, g)
        if self.leading_coefficient() < 0:
            scale = -scale
        return self * scale

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if not self._terms:
            return self
        return self / self.leading_coefficient(order)

    def coefficient_vector(self, basis: Sequence[Exponent]) -> np.ndarray:
        index = {e: k for k, e in enumerate(basis)}
        v = np.zeros(len(basis))
        for e, c in self._terms.items():
            if e not in index:
                raise ValueError(f"monomial {e} not in the supplied basis")
            v[index[e]] = float(c)
        return v

    def norm(self) -> float:
        return math.sqrt(sum(float(c) ** 2 for c in self._terms.values()))

    def rationalize(self, max_denominator: int = 10_000, tol: float = 1e-6) -> "Polynomial":
        """Round a float polynomial to nearby rationals; returns ``self`` if any term misses ``tol``."""
        if self.exact:
            return self
        out = {}
        for e, c in self._terms.items():
            q = Fraction(c).limit_denominator(max_denominator)
            if abs(float(q) - c) > tol:
                return self
            out[e] = q
        return Polynomial(self.nvars, out, exact=True)

    # -- printing --------------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None, order: MonomialOrder = GREVLEX) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=order.key, reverse=True):
            c = self._terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            neg = c < 0
            mag = -c if neg else c
            if self.exact:
                cs = str(mag) if mag.denominator == 1 else f"({mag})"
            else:
                cs = f"{mag:.12g}"
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{cs}*{mono}"
            else:
                body = cs
            parts.append(("- " if neg else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"Polynomial<{kind}>({self.to_str()})"


def evaluate(p: Polynomial, point: Sequence) -> object:
    """Direct term-sum evaluation.  Exact when ``p`` and ``point`` are exact."""
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    total = Fraction(0) if p.exact else 0.0
    exact_point = p.exact and all(isinstance(v, (int, Fraction)) for v in point)
    pt = point if exact_point else [float(v) for v in point]
    for e, c in p.items():
        term = c if exact_point else float(c)
        for v, k in zip(pt, e):
            if k:
                term = term * v ** k
        total = total + term
    return total


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    return p.diff(i)


# ---------------------------------------------------------------------------
# variable spaces


@dataclass(frozen=True)
class VariableSpace:
    """Named variables: the base ``x`` block first, lifted multipliers after it."""

    names: tuple[str, ...]
    nbase: int

    @classmethod
    def of(cls, names: Sequence[str]) -> "VariableSpace":
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        return cls(names, len(names))

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def base(self) -> tuple[str, ...]:
        return self.names[: self.nbase]

    @property
    def base_indices(self) -> tuple[int, ...]:
        return tuple(range(self.nbase))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def lift(self, prefix: str, count: int, start: int = 1) -> tuple["VariableSpace", list[int]]:
        """Append ``count`` fresh variables ``prefix{start}``, ``prefix{start+1}``, ..."""
        new = []
        for k in range(start, start + count):
            name = f"{prefix}{k}"
            while name in self.names or name in new:
                name = "_" + name
            new.append(name)
        idx = list(range(self.nvars, self.nvars + count))
        return VariableSpace(self.names + tuple(new), self.nbase), idx

    def embed(self, p: Polynomial) -> Polynomial:
        """Place a polynomial over a prefix of these variables into the full space."""
        return p.embed(self.nvars, list(range(p.nvars)))

    def project(self, p: Polynomial) -> Polynomial:
        return p.restrict(self.base_indices)


# ---------------------------------------------------------------------------
# determinants and minors


def determinant(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant of a square matrix of polynomials by Laplace expansion with memoisation.

    The empty matrix has determinant 1 -- callers rely on this for
    0 x 0 minors.
    """
    k = len(rows)
    if k == 0:
        raise ValueError("use determinant_of_size for the empty matrix")
    nv = rows[0][0].nvars
    exact = rows[0][0].exact
    memo: dict[tuple[int, ...], Polynomial] = {}

    def sub(col: int, avail: tuple[int, ...]) -> Polynomial:
        # det of rows ``avail`` against columns col..k-1
        if col == k:
            return Polynomial.constant(nv, 1, exact)
        if avail in memo:
            return memo[avail]
        acc = Polynomial.zero(nv, exact)
        for pos, r in enumerate(avail):
            entry = rows[r][col]
            if entry.is_zero():
                continue
            rest = avail[:pos] + avail[pos + 1:]
            term = entry * sub(col + 1, rest)
            acc = acc - term if pos % 2 else acc + term
        memo[avail] = acc
        return acc

    return sub(0, tuple(range(k)))


def _matrix_from_columns(cols: Sequence[Sequence[Polynomial]]) -> list[list[Polynomial]]:
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("gradient columns have different lengths")
    return [[cols[j][i] for j in range(len(cols))] for i in range(n)]


def iter_minors(cols: Sequence[Sequence[Polynomial]], k: int,
                anchored: bool = False) -> Iterator[Polynomial]:
    """Lazily yield every k x k minor of the matrix with the given columns.

    Rows and columns are chosen in increasing index order, so the minor for
    rows (i, j) of columns (a, b) is ``M[i][a] M[j][b] - M[j][a] M[i][b]``.
    With ``anchored`` only column subsets containing column 0 are used.
    """
    if not cols:
        raise ValueError("need at least one column")
    n = len(cols[0])
    ncols = len(cols)
    if k < 1 or k > min(n, ncols):
        raise ValueError(f"minor size {k} exceeds the {n} x {ncols} matrix")
    mat = _matrix_from_columns(cols)
    col_sets = (c for c in itertools.combinations(range(ncols), k) if not anchored or c[0] == 0)
    for cs in col_sets:
        for rs in itertools.combinations(range(n), k):
            yield determinant([[mat[r][c] for c in cs] for r in rs])


def jacobian_minors(cols: Sequence[Sequence[Polynomial]], k: int,
                    anchored: bool = False) -> list[Polynomial]:
    """All distinct nonzero k x k minors, in generation order."""
    seen: set[Polynomial] = set()
    out = []
    for m in iter_minors(cols, k, anchored):
        if m.is_zero() or m in seen:
            continue
        seen.add(m)
        out.append(m)
    return out


def gram_determinant(cols: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """det of the Gram matrix of the columns: entry (a, b) is <col_a, col_b>.

    Equals the sum of squared maximal minors (Cauchy-Binet), so it vanishes
    at a real point exactly when the columns are dependent there.
    """
    if not cols:
        raise ValueError("need at least one column")
    k = len(cols)
    gram = [[None] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            s = Polynomial.zero(cols[a][0].nvars, cols[a][0].exact)
            for pa, pb in zip(cols[a], cols[b]):
                s = s + pa * pb
            gram[a][b] = gram[b][a] = s
    return determinant(gram)


# ---------------------------------------------------------------------------
# text grammar

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class PolynomialSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def parse_polynomial(text: str, names: Sequence[str]) -> Polynomial:
    """Parse ``text`` into an exact polynomial over the variables ``names``.

    Grammar: identifiers, integer and decimal literals, ``+ - * ^`` (``**``
    also accepted), division by a nonzero constant and parentheses.  Decimal literals become exact rationals,
    so ``0.06`` is 3/50.
    """
    tokens = _tokenize(text)
    index = {n: i for i, n in enumerate(names)}
    nv = len(names)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr() -> Polynomial:
        kind, val = peek()
        sign = 1
        if kind == "op" and val in "+-":
            take()
            sign = -1 if val == "-" else 1
        acc = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term() -> Polynomial:
        acc = factor()
        while peek() in (("op", "*"), ("op", "/")):
            _, op = take()
            rhs = factor()
            if op == "*":
                acc = acc * rhs
                continue
            if not rhs.is_constant() or rhs.is_zero():
                raise PolynomialSyntaxError(f"can only divide by a nonzero constant in {text!r}")
            acc = acc / rhs.coefficient((0,) * nv)
        return acc

    def factor() -> Polynomial:
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            neg = False
            if (kind, val) == ("op", "-"):
                neg = True
                kind, val = take()
            if kind != "num" or "." in val or neg:
                raise PolynomialSyntaxError(f"exponent must be a non-negative integer in {text!r}")
            return base ** int(val)
        return base

    def atom() -> Polynomial:
        kind, val = take()
        if kind == "num":
            return Polynomial.constant(nv, Fraction(val))
        if kind == "id":
            if val not in index:
                raise PolynomialSyntaxError(f"unknown variable {val!r}")
            return Polynomial.variable(nv, index[val])
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise PolynomialSyntaxError(f"missing ')' in {text!r}")
            return inner
        if (kind, val) == ("op", "-"):
            return -factor()
        raise PolynomialSyntaxError(f"unexpected token {val!r} in {text!r}")

    if not tokens:
        raise PolynomialSyntaxError("empty polynomial")
    result = expr()
    if pos != len(tokens):
        raise PolynomialSyntaxError(f"trailing input {tokens[pos][1]!r} in {text!r}")
    return result


def variables(names: Sequence[str] | str) -> list[Polynomial]:
    """Convenience: exact variable polynomials, e.g. ``x, y = variables("x y")``."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return [Polynomial.variable(len(names), i) for i in range(len(names))]
