"""
Exact Linear Algebra Module for the Affine Quiver toolkit

Exact arithmetic over prime fields F_p and the rationals, and the matrix kernels
every other module is built on:
- rank, reduced row echelon form, kernel and column-space bases
- cokernel projections (a complement of the image, in coordinates)
- linear solves, inverses, block and Kronecker constructions

F_p elements are Python ints in 0..p-1; rational entries are ``fractions.Fraction``
in lowest terms. Echelon forms use the leftmost pivot and the first nonzero row
below the current one, so every basis returned here is deterministic.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import isprime

try:
    from .errors import ParseError, UsageError
except ImportError:
    from errors import ParseError, UsageError


MAX_PRIME = 2 ** 31


class Field:
    """A prime field F_p (``p`` given) or the rationals (``p`` is None)."""

    __slots__ = ("p",)

    def __init__(self, p: Optional[int] = None):
        if p is not None:
            if isinstance(p, bool) or not isinstance(p, int):
                raise UsageError(f"field characteristic must be an integer, got {p!r}")
            if p > MAX_PRIME or not isprime(p):
                raise UsageError(f"{p} is not a supported prime (primes up to 2^31)")
        self.p = p

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    @property
    def size(self) -> Optional[int]:
        return self.p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"F_{self.p}" if self.p is not None else "Q"

    @property
    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def __call__(self, value):
        """Coerce an int, Fraction or "num/den" string into this field."""
        if isinstance(value, str):
            try:
                value = Fraction(value.strip())
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"cannot read field entry {value!r}")
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise UsageError(f"{value} has no image in {self!r}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def norm(self, value):
        return value % self.p if self.p is not None else value

    def inv(self, value):
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is not None:
            return pow(value, -1, self.p)
        return 1 / Fraction(value)

    def random_element(self, rng, spread: int = 50):
        if self.p is not None:
            return rng.randrange(self.p)
        return Fraction(rng.randint(-spread, spread))

    def elements(self) -> range:
        if self.p is None:
            raise UsageError("the rationals cannot be enumerated")
        return range(self.p)

    def encode(self, value):
        if self.p is not None:
            return int(value)
        value = Fraction(value)
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"

    def to_json(self) -> dict:
        if self.p is None:
            return {"type": "rational"}
        return {"type": "prime", "p": self.p}

    @classmethod
    def from_json(cls, data) -> "Field":
        if not isinstance(data, dict) or "type" not in data:
            raise ParseError("field must be an object with key 'type'")
        if data["type"] == "rational":
            return cls(None)
        if data["type"] == "prime":
            if "p" not in data:
                raise ParseError("prime field is missing key 'p'")
            return cls(data["p"])
        raise ParseError(f"unknown field type {data['type']!r}")


@dataclass(frozen=True)
class Matrix:
    """An immutable rows x cols matrix over a Field (entries stored row by row)."""

    field: Field
    rows: int
    cols: int
    entries: Tuple[tuple, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise UsageError(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        data = tuple(tuple(field(x) for x in row) for row in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(field, len(data), cols, data)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], rows: int) -> "Matrix":
        data = tuple(tuple(field(columns[j][i]) for j in range(len(columns))) for i in range(rows))
        return cls(field, rows, len(columns), data)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> List[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def transpose(self) -> "Matrix":
        data = tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols))
        return Matrix(self.field, self.cols, self.rows, data)

    T = property(transpose)

    def _check_same(self, other: "Matrix"):
        if other.field != self.field or other.shape != self.shape:
            raise UsageError(f"shape or field mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        norm = self.field.norm
        data = tuple(tuple(norm(a + b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        return Matrix(self.field, self.rows, self.cols, data)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        norm = self.field.norm
        data = tuple(tuple(norm(a - b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        return Matrix(self.field, self.rows, self.cols, data)

    def __neg__(self) -> "Matrix":
        return self.scale(self.field(-1))

    def scale(self, c) -> "Matrix":
        norm = self.field.norm
        data = tuple(tuple(norm(c * a) for a in r) for r in self.entries)
        return Matrix(self.field, self.rows, self.cols, data)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if other.field != self.field or self.cols != other.rows:
            raise UsageError(f"cannot multiply {self.shape} by {other.shape}")
        norm = self.field.norm
        zero = self.field.zero
        other_cols = other.columns()
        data = tuple(
            tuple(norm(sum((a * b for a, b in zip(row, col) if a and b), zero)) for col in other_cols)
            for row in self.entries
        )
        return Matrix(self.field, self.rows, other.cols, data)

    def tolist(self, encode: bool = False) -> list:
        if encode:
            return [[self.field.encode(x) for x in row] for row in self.entries]
        return [list(row) for row in self.entries]

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.rows}x{self.cols}, {self.tolist(encode=True)})"


def zeros(field: Field, rows: int, cols: int) -> Matrix:
    z = field.zero
    return Matrix(field, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))


def identity(field: Field, n: int) -> Matrix:
    z, o = field.zero, field.one
    return Matrix(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))


def unit_vector(field: Field, n: int, k: int) -> Matrix:
    """The k-th standard basis vector of field^n as an n x 1 matrix."""
    z, o = field.zero, field.one
    return Matrix(field, n, 1, tuple((o if i == k else z,) for i in range(n)))


def hstack(field: Field, blocks: Sequence[Matrix], rows: int) -> Matrix:
    for b in blocks:
        if b.rows != rows:
            raise UsageError(f"hstack expects {rows} rows, got {b.rows}")
    data = tuple(tuple(x for b in blocks for x in b.entries[i]) for i in range(rows))
    return Matrix(field, rows, sum(b.cols for b in blocks), data)


def vstack(field: Field, blocks: Sequence[Matrix], cols: int) -> Matrix:
    for b in blocks:
        if b.cols != cols:
            raise UsageError(f"vstack expects {cols} columns, got {b.cols}")
    data = tuple(row for b in blocks for row in b.entries)
    return Matrix(field, len(data), cols, data)


def block_matrix(field: Field, blocks: Sequence[Sequence[Optional[Matrix]]],
                 row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    """Assemble a matrix from a grid of blocks; ``None`` means a zero block."""
    rows = []
    for bi, rsize in enumerate(row_sizes):
        for i in range(rsize):
            row = []
            for bj, csize in enumerate(col_sizes):
                block = blocks[bi][bj]
                if block is None:
                    row.extend([field.zero] * csize)
                else:
                    if block.shape != (rsize, csize):
                        raise UsageError(f"block ({bi},{bj}) has shape {block.shape}, expected {(rsize, csize)}")
                    row.extend(block.entries[i])
            rows.append(tuple(row))
    return Matrix(field, sum(row_sizes), sum(col_sizes), tuple(rows))


def block_diag(field: Field, blocks: Sequence[Matrix]) -> Matrix:
    grid = [[b if i == j else None for j, b in enumerate(blocks)] for i in range(len(blocks))]
    return block_matrix(field, grid, [b.rows for b in blocks], [b.cols for b in blocks])


def kron(a: Matrix, b: Matrix) -> Matrix:
    norm = a.field.norm
    data = tuple(
        tuple(norm(a.entries[i][j] * b.entries[k][l]) for j in range(a.cols) for l in range(b.cols))
        for i in range(a.rows) for k in range(b.rows)
    )
    return Matrix(a.field, a.rows * b.rows, a.cols * b.cols, data)


def submatrix(m: Matrix, row_range: Iterable[int], col_range: Iterable[int]) -> Matrix:
    rows = list(row_range)
    cols = list(col_range)
    data = tuple(tuple(m.entries[i][j] for j in cols) for i in rows)
    return Matrix(m.field, len(rows), len(cols), data)


def matrix_power(m: Matrix, k: int) -> Matrix:
    result = identity(m.field, m.rows)
    base = m
    while k:
        if k & 1:
            result = result @ base
        base = base @ base
        k >>= 1
    return result


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    field = m.field
    norm = field.norm
    rows = [list(r) for r in m.entries]
    pivots: List[int] = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        pivot_row = next((i for i in range(r, m.rows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = field.inv(rows[r][c])
        if inv != 1:
            rows[r] = [norm(x * inv) for x in rows[r]]
        pivot = rows[r]
        for i in range(m.rows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [norm(x - factor * y) for x, y in zip(rows[i], pivot)]
        pivots.append(c)
        r += 1
    return Matrix(field, m.rows, m.cols, tuple(tuple(row) for row in rows)), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of ker m, one column per free column of the echelon form."""
    field = m.field
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    columns = []
    for f in free:
        vec = [field.zero] * m.cols
        vec[f] = field.one
        for row_index, pc in enumerate(pivots):
            vec[pc] = field.norm(-reduced.entries[row_index][f])
        columns.append(vec)
    return Matrix.from_columns(field, columns, m.cols)


def cokernel_projection(m: Matrix) -> Matrix:
    """A full-rank P with P @ m = 0 and rank(P) = rows - rank(m)."""
    return kernel_basis(m.transpose()).transpose()


def column_space_basis(m: Matrix) -> Matrix:
    _, pivots = rref(m)
    return submatrix(m, range(m.rows), pivots)


def complement_basis(m: Matrix) -> List[int]:
    """Coordinates whose standard vectors complete a basis of the column space of m."""
    _, pivots = rref(m.transpose())
    pivot_set = set(pivots)
    return [j for j in range(m.rows) if j not in pivot_set]


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Some x with a @ x = b (free variables set to zero), or None if inconsistent."""
    if a.rows != b.rows:
        raise UsageError(f"solve: {a.rows} equations against a right-hand side with {b.rows} rows")
    if a.field != b.field:
        raise UsageError("solve: field mismatch")
    field = a.field
    augmented = hstack(field, [a, b], a.rows)
    reduced, pivots = rref(augmented)
    if any(c >= a.cols for c in pivots):
        return None
    data = [[field.zero] * b.cols for _ in range(a.cols)]
    for row_index, pc in enumerate(pivots):
        for k in range(b.cols):
            data[pc][k] = reduced.entries[row_index][a.cols + k]
    return Matrix(field, a.cols, b.cols, tuple(tuple(r) for r in data))


def is_invertible(m: Matrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise UsageError(f"cannot invert a {m.rows}x{m.cols} matrix")
    x = solve(m, identity(m.field, m.rows))
    if x is None or rank(m) != m.rows:
        raise UsageError("matrix is singular")
    return x


def parse_matrix(field: Field, raw, rows: Optional[int] = None, cols: Optional[int] = None) -> Matrix:
    """Read a matrix from a JSON string or nested list."""
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ParseError(f"matrix is not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}")
    if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
        raise ParseError("matrix must be a list of rows")
    if rows is not None and len(raw) != rows:
        raise ParseError(f"expected {rows} rows, got {len(raw)}")
    width = len(raw[0]) if raw else (cols or 0)
    if cols is not None and raw and width != cols:
        raise ParseError(f"expected {cols} columns, got {width}")
    if any(len(r) != width for r in raw):
        raise ParseError("matrix rows have different lengths")
    return Matrix.from_rows(field, raw, cols if cols is not None else width)


def register_tools(mcp):
    """Register the exact linear algebra tool with the MCP server."""

    @mcp.tool()
    async def exact_linear_algebra(
        operation: str,
        matrix: str = "",
        rhs: str = "",
        field: str = "17",
    ) -> str:
        """
        Exact linear algebra over F_p or Q.

        Args:
            operation: "rank", "kernel_basis", "cokernel_projection" or "solve"
            matrix: matrix as a JSON list of rows; rational entries may be "num/den" strings
            rhs: right-hand side matrix for "solve"
            field: a prime such as "17", or "Q" for the rationals

        Returns:
            String with the result
        """
        valid_operations = {
            "rank": _rank_tool,
            "kernel_basis": _kernel_tool,
            "cokernel_projection": _cokernel_tool,
            "solve": _solve_tool,
        }
        if operation not in valid_operations:
            return f"❌ Invalid operation '{operation}'. Valid operations: {', '.join(valid_operations)}"
        try:
            f = Field(None) if field.strip().upper() in ("Q", "RATIONAL") else Field(int(field))
            if not matrix:
                return f"❌ Operation '{operation}' requires parameter: matrix"
            m = parse_matrix(f, matrix)
            return valid_operations[operation](m, rhs)
        except Exception as e:
            code = getattr(e, "code", "error")
            return f"❌ Error in {operation} [{code}]: {str(e)}"


def _rank_tool(m: Matrix, rhs: str) -> str:
    return f"✅ rank = {rank(m)} over {m.field!r}"


def _kernel_tool(m: Matrix, rhs: str) -> str:
    k = kernel_basis(m)
    return f"✅ kernel basis ({k.cols} columns): {json.dumps(k.tolist(encode=True))}"


def _cokernel_tool(m: Matrix, rhs: str) -> str:
    p = cokernel_projection(m)
    return f"✅ cokernel projection ({p.rows} rows): {json.dumps(p.tolist(encode=True))}"


def _solve_tool(m: Matrix, rhs: str) -> str:
    if not rhs:
        return "❌ Operation 'solve' requires parameter: rhs"
    b = parse_matrix(m.field, rhs)
    x = solve(m, b)
    if x is None:
        return "✅ no solution"
    return f"✅ solution: {json.dumps(x.tolist(encode=True))}"
