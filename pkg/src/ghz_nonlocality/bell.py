"""Tripartite two-setting Bell expressions and the facet file format.

A coefficient tensor ``c[i, j, k]`` has one axis per party (A, B, C).  Index
0 means the party is not measured (identity), indices 1 and 2 select setting
0 and 1.  So ``c[2, 1, 1]`` is the coefficient of <A1 B0 C0> and
``c[0, 2, 1]`` that of <B1 C0>.

File format, one expression per file or several separated by ``---``::

    # comment
    name mermin;
    polytope L3;
    bound 2;
    +1 A1B0C0 +1 A0B1C0 +1 A0B0C1 -1 A1B1C1
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

PARTIES = "ABC"
POLYTOPES = ("L3", "NS2")
BUILTIN_NAMES = ("mermin", "sliwa15", "svetlichny", "bancal99")


class FacetSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


def term_name(index: tuple[int, int, int]) -> str:
    return "".join(f"{party}{i - 1}" for party, i in zip(PARTIES, index) if i)


_TERM_RE = re.compile(r"(?:A([01]))?(?:B([01]))?(?:C([01]))?$")


def term_index(name: str) -> tuple[int, int, int]:
    m = _TERM_RE.match(name)
    if not name or m is None:
        raise ValueError(f"bad term {name!r}")
    return tuple(0 if g is None else int(g) + 1 for g in m.groups())


@dataclass(frozen=True, eq=False)
class BellExpression:
    name: str
    coefficients: np.ndarray
    bound: float
    polytope: str = "L3"

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.shape != (3, 3, 3):
            raise ValueError(f"coefficient tensor must be 3x3x3, got {c.shape}")
        if c[0, 0, 0] != 0:
            raise ValueError("the identity term must have coefficient 0")
        if not np.any(c):
            raise ValueError("expression has no nonzero coefficient")
        if self.bound == 0:
            raise ValueError("zero bound")
        if self.bound < 0:
            raise ValueError("bound must be positive")
        if self.polytope not in POLYTOPES:
            raise ValueError(f"unknown polytope {self.polytope!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "bound", float(self.bound))

    @classmethod
    def from_terms(cls, name: str, terms: dict[str, float], bound: float, polytope: str) -> "BellExpression":
        c = np.zeros((3, 3, 3))
        for t, v in terms.items():
            c[term_index(t)] = v
        return cls(name, c, bound, polytope)

    def terms(self) -> list[tuple[str, float]]:
        """Nonzero terms ordered by body count, then A, B, C settings."""
        idx = [i for i in itertools.product(range(3), repeat=3) if self.coefficients[i] != 0]
        idx.sort(key=lambda i: (sum(x > 0 for x in i), [(x == 0, x) for x in i]))
        return [(term_name(i), float(self.coefficients[i])) for i in idx]

    def __neg__(self) -> "BellExpression":
        return BellExpression(f"-{self.name}", -self.coefficients, self.bound, self.polytope)

    def equivalent(self, other: "BellExpression") -> bool:
        """Same inequality, ignoring the name."""
        return (
            self.polytope == other.polytope
            and self.bound == other.bound
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def __eq__(self, other):
        if not isinstance(other, BellExpression):
            return NotImplemented
        return self.name == other.name and self.equivalent(other)

    def __hash__(self):
        return hash((self.name, self.polytope, self.bound, self.coefficients.tobytes()))


_BUILTIN_TERMS = {
    "mermin": ({"A1B0C0": 1, "A0B1C0": 1, "A0B0C1": 1, "A1B1C1": -1}, 2, "L3"),
    "sliwa15": (
        {
            "A0B0": 2, "A1B0": 2, "A0C0": 1, "A1C0": 1, "B0C0": -2, "A0B1C0": 1,
            "A1B1C0": -1, "A0C1": 1, "A1C1": 1, "B0C1": -2, "A0B1C1": -1, "A1B1C1": 1,
        },
        4,
        "L3",
    ),
    "svetlichny": (
        {
            "A0B0C0": 1, "A1B0C0": 1, "A0B1C0": -1, "A1B1C0": 1,
            "A0B0C1": 1, "A1B0C1": -1, "A0B1C1": 1, "A1B1C1": 1,
        },
        4,
        "NS2",
    ),
    "bancal99": ({"A1B1": 1, "A0B0C0": 1, "B1C0": 1, "A1C1": 1, "A0B0C1": -1}, 3, "NS2"),
}


def builtin(name: str) -> BellExpression:
    try:
        terms, bound, polytope = _BUILTIN_TERMS[name]
    except KeyError:
        raise ValueError(f"unknown builtin inequality {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return BellExpression.from_terms(name, terms, bound, polytope)


def evaluate(expr: BellExpression, correlations: np.ndarray) -> float:
    """Signed value sum c[i,j,k] <ijk> of an expression on a correlation tensor.

    ``correlations`` is a 3x3x3 array in the coefficient layout; NaN marks a
    correlator that is not available.
    """
    corr = np.asarray(correlations, dtype=float)
    if corr.shape != (3, 3, 3):
        raise ValueError(f"correlation tensor must be 3x3x3, got {corr.shape}")
    needed = expr.coefficients != 0
    missing = needed & np.isnan(corr)
    if missing.any():
        names = [term_name(tuple(int(x) for x in i)) for i in np.argwhere(missing)]
        raise KeyError(f"missing correlators: {', '.join(names)}")
    return float(np.sum(expr.coefficients[needed] * corr[needed]))


def deterministic_values(expr: BellExpression) -> np.ndarray:
    """Values on all 64 deterministic +-1 strategies (A0, A1, B0, B1, C0, C1)."""
    out = []
    for signs in itertools.product((1, -1), repeat=6):
        a = np.array([1, signs[0], signs[1]])
        b = np.array([1, signs[2], signs[3]])
        c = np.array([1, signs[4], signs[5]])
        out.append(evaluate(expr, np.einsum("i,j,k->ijk", a, b, c)))
    return np.array(out)


def _fmt_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def render(expr: BellExpression) -> str:
    terms = " ".join(f"{'+' if v > 0 else '-'}{_fmt_number(abs(v))} {t}" for t, v in expr.terms())
    return f"name {expr.name};\npolytope {expr.polytope};\nbound {_fmt_number(expr.bound)};\n{terms}\n"


_TOKEN_RE = re.compile(r"[^\s;]+|;")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")


def _tokens(text: str, line_offset: int):
    for lineno, line in enumerate(text.splitlines(), start=line_offset):
        line = line.split("#", 1)[0]
        for m in _TOKEN_RE.finditer(line):
            yield m.group(), lineno, m.start() + 1


def _parse_one(text: str, line_offset: int) -> BellExpression:
    toks = list(_tokens(text, line_offset))
    header: dict[str, tuple[str, int, int]] = {}
    terms: dict[tuple[int, int, int], float] = {}
    pos = 0
    while pos < len(toks) and toks[pos][0] in ("name", "polytope", "bound"):
        key, line, col = toks[pos]
        if key in header:
            raise FacetSyntaxError(f"duplicate {key!r} statement", line, col)
        if pos + 1 >= len(toks) or toks[pos + 1][0] == ";":
            raise FacetSyntaxError(f"{key!r} needs a value", line, col)
        if pos + 2 >= len(toks) or toks[pos + 2][0] != ";":
            tok = toks[pos + 2] if pos + 2 < len(toks) else toks[pos + 1]
            raise FacetSyntaxError(f"expected ';' after {key} value", tok[1], tok[2])
        header[key] = toks[pos + 1]
        pos += 3
    while pos < len(toks):
        coeff, line, col = toks[pos]
        if coeff in ("name", "polytope", "bound"):
            raise FacetSyntaxError(f"{coeff!r} statement after terms", line, col)
        if coeff[0] not in "+-" or not _NUMBER_RE.match(coeff):
            raise FacetSyntaxError(f"expected signed coefficient, got {coeff!r}", line, col)
        if pos + 1 >= len(toks):
            raise FacetSyntaxError(f"coefficient {coeff!r} without a term", line, col)
        term, tline, tcol = toks[pos + 1]
        try:
            idx = term_index(term)
        except ValueError:
            raise FacetSyntaxError(f"bad term {term!r}", tline, tcol) from None
        if idx in terms:
            raise FacetSyntaxError(f"duplicate term {term!r}", tline, tcol)
        terms[idx] = float(coeff)
        pos += 2

    if "bound" not in header:
        raise FacetSyntaxError("missing 'bound' statement")
    bound_tok, bline, bcol = header["bound"]
    if not _NUMBER_RE.match(bound_tok):
        raise FacetSyntaxError(f"bad bound {bound_tok!r}", bline, bcol)
    bound = float(bound_tok)
    if bound == 0:
        raise FacetSyntaxError("zero bound", bline, bcol)
    if bound < 0:
        raise FacetSyntaxError("bound must be positive", bline, bcol)
    polytope = header.get("polytope", ("L3", None, None))
    if polytope[0] not in POLYTOPES:
        raise FacetSyntaxError(f"unknown polytope {polytope[0]!r}", polytope[1], polytope[2])
    name = header.get("name", ("unnamed",))[0]
    if not terms:
        raise FacetSyntaxError("expression has no terms")
    c = np.zeros((3, 3, 3))
    for idx, v in terms.items():
        c[idx] = v
    try:
        return BellExpression(name, c, bound, polytope[0])
    except ValueError as exc:
        raise FacetSyntaxError(str(exc)) from None


def _has_content(chunk: str) -> bool:
    return any(line.split("#", 1)[0].strip() for line in chunk.splitlines())


def parse_all(text: str) -> list[BellExpression]:
    chunks, current, start = [], [], 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "---":
            chunks.append(("\n".join(current), start))
            current, start = [], lineno + 1
        else:
            current.append(line)
    chunks.append(("\n".join(current), start))
    out = [_parse_one(chunk, first) for chunk, first in chunks if _has_content(chunk)]
    if not out:
        raise FacetSyntaxError("no expression found")
    return out


def parse(text: str) -> BellExpression:
    exprs = parse_all(text)
    if len(exprs) != 1:
        raise FacetSyntaxError(f"expected one expression, found {len(exprs)}")
    return exprs[0]


def load(path_or_name: str) -> BellExpression:
    """A builtin by name, otherwise the single expression in a facet file."""
    if path_or_name in BUILTIN_NAMES:
        return builtin(path_or_name)
    with open(path_or_name, encoding="utf-8") as fh:
        return parse(fh.read())
