"""
Representation Module for the Affine Quiver toolkit

Finite-dimensional representations of a quiver over an exact field:
- Hom spaces and Ext^1 from one two-term complex
- extensions from cocycles, subrepresentations and quotients
- direct sums, isomorphism tests and Krull-Schmidt decomposition
- nilpotency and orbit dimension

Hom(M, N) is the kernel of d: (f_i) -> (f_h x_w - y_w f_t) and Ext^1(M, N) its
cokernel. Unknowns are laid out vertex by vertex, each block a row-major
N_i x M_i matrix; equations are laid out arrow by arrow.
"""

import itertools
import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import Poly, Rational, symbols
from sympy import Matrix as SympyMatrix

try:
    from .config import ISO_EXHAUSTIVE_LIMIT, ISO_TRIALS, LOCAL_EXHAUSTIVE_LIMIT, SPLIT_TRIALS
    from .errors import NeedsLargerField, ParseError, UsageError
    from .exactfield import (
        Field, Matrix, column_space_basis, complement_basis, cokernel_projection, hstack,
        identity, kernel_basis, matrix_power, parse_matrix, rank, solve, zeros,
    )
    from .quiver import DimVector, Quiver
except ImportError:
    from config import ISO_EXHAUSTIVE_LIMIT, ISO_TRIALS, LOCAL_EXHAUSTIVE_LIMIT, SPLIT_TRIALS
    from errors import NeedsLargerField, ParseError, UsageError
    from exactfield import (
        Field, Matrix, column_space_basis, complement_basis, cokernel_projection, hstack,
        identity, kernel_basis, matrix_power, parse_matrix, rank, solve, zeros,
    )
    from quiver import DimVector, Quiver


logger = logging.getLogger(__name__)

Morphism = Tuple[Matrix, ...]


@dataclass(frozen=True)
class Representation:
    """(V, x): a space per vertex and a dims[h] x dims[t] matrix per arrow."""

    quiver: Quiver
    field: Field
    dims: DimVector
    maps: Tuple[Matrix, ...]

    def __post_init__(self):
        q = self.quiver
        object.__setattr__(self, "dims", q.check_vector(self.dims))
        object.__setattr__(self, "maps", tuple(self.maps))
        if any(d < 0 for d in self.dims):
            raise UsageError("dimensions must be nonnegative")
        if len(self.maps) != len(q.arrows):
            raise UsageError(f"expected {len(q.arrows)} arrow maps, got {len(self.maps)}")
        for arrow, m in zip(q.arrows, self.maps):
            expected = (self.dims[q.index(arrow.head)], self.dims[q.index(arrow.tail)])
            if m.shape != expected or m.field != self.field:
                raise UsageError(f"map for arrow {arrow.id} has shape {m.shape}, expected {expected}")

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def dim_at(self, vertex) -> int:
        return self.dims[self.quiver.index(vertex)]

    def map_for(self, arrow_id: str) -> Matrix:
        for arrow, m in zip(self.quiver.arrows, self.maps):
            if arrow.id == arrow_id:
                return m
        raise UsageError(f"unknown arrow {arrow_id!r}")

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def to_json(self) -> dict:
        q = self.quiver
        return {
            "quiver": q.to_json(),
            "field": self.field.to_json(),
            "dims": {v: d for v, d in zip(q.vertices, self.dims)},
            "maps": {a.id: m.tolist(encode=True) for a, m in zip(q.arrows, self.maps)},
        }

    @classmethod
    def from_json(cls, data, quiver: Optional[Quiver] = None, field: Optional[Field] = None) -> "Representation":
        """Parse Representation JSON; ``quiver``/``field`` override the embedded ones."""
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise ParseError(f"representation is not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}")
        if not isinstance(data, dict):
            raise ParseError("representation must be a JSON object")
        for key in ("dims", "maps"):
            if key not in data:
                raise ParseError(f"representation is missing key '{key}'")
        if quiver is None:
            if "quiver" not in data:
                raise ParseError("representation is missing key 'quiver'")
            quiver = Quiver.from_json(data["quiver"])
        if field is None:
            if "field" not in data:
                raise ParseError("representation is missing key 'field'")
            field = Field.from_json(data["field"])
        raw_dims = data["dims"]
        if isinstance(raw_dims, dict):
            unknown = set(raw_dims) - set(quiver.vertices)
            if unknown:
                raise ParseError(f"dims names unknown vertex {sorted(unknown)[0]!r}")
            dims = tuple(int(raw_dims.get(v, 0)) for v in quiver.vertices)
        else:
            dims = tuple(int(x) for x in raw_dims)
        maps = []
        for arrow in quiver.arrows:
            rows, cols = dims[quiver.index(arrow.head)], dims[quiver.index(arrow.tail)]
            raw = data["maps"].get(arrow.id)
            if raw is None:
                if rows * cols:
                    raise ParseError(f"maps is missing key '{arrow.id}'")
                maps.append(zeros(field, rows, cols))
                continue
            try:
                maps.append(parse_matrix(field, raw, rows, cols))
            except ParseError as e:
                raise ParseError(f"map '{arrow.id}': {e}")
        try:
            return cls(quiver, field, dims, tuple(maps))
        except UsageError as e:
            raise ParseError(str(e))


@dataclass(frozen=True)
class HomBasis:
    source: Representation
    target: Representation
    basis: Tuple[Morphism, ...]

    def __len__(self):
        return len(self.basis)

    def combination(self, coeffs: Sequence) -> Morphism:
        return combine(self.source, self.target, self.basis, coeffs)


def _check_compatible(m: Representation, n: Representation):
    if m.quiver != n.quiver:
        raise UsageError("representations live on different quivers")
    if m.field != n.field:
        raise UsageError("representations live over different fields")


def zero_rep(q: Quiver, f: Field) -> Representation:
    maps = tuple(zeros(f, 0, 0) for _ in q.arrows)
    return Representation(q, f, q.zero_vector(), maps)


def random_rep(q: Quiver, f: Field, dims: Sequence[int], rng: random.Random) -> Representation:
    dims = q.check_vector(dims)
    maps = []
    for arrow in q.arrows:
        rows, cols = dims[q.index(arrow.head)], dims[q.index(arrow.tail)]
        maps.append(Matrix(f, rows, cols, tuple(
            tuple(f.random_element(rng) for _ in range(cols)) for _ in range(rows))))
    return Representation(q, f, dims, tuple(maps))


def dim_vector(m: Representation) -> DimVector:
    return m.dims


def direct_sum(*reps: Representation) -> Representation:
    """Block-diagonal direct sum; summands stacked in argument order."""
    if not reps:
        raise UsageError("direct_sum needs at least one summand")
    first = reps[0]
    for other in reps[1:]:
        _check_compatible(first, other)
    q, f = first.quiver, first.field
    dims = tuple(sum(r.dims[k] for r in reps) for k in range(q.n))
    maps = []
    for k in range(len(q.arrows)):
        blocks = [r.maps[k] for r in reps]
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        data, col_offset = [], 0
        for b in blocks:
            for row in b.entries:
                data.append((f.zero,) * col_offset + row + (f.zero,) * (cols - col_offset - b.cols))
            col_offset += b.cols
        maps.append(Matrix(f, rows, cols, tuple(data)))
    return Representation(q, f, dims, tuple(maps))


def power(m: Representation, k: int) -> Representation:
    if k == 0:
        return zero_rep(m.quiver, m.field)
    return direct_sum(*([m] * k))


def is_nilpotent(m: Representation) -> bool:
    """True iff J^k V vanishes for some k, J the arrow ideal."""
    q, f = m.quiver, m.field
    layer = [identity(f, d) for d in m.dims]
    for _ in range(m.total_dim + 1):
        if all(b.cols == 0 for b in layer):
            return True
        nxt = []
        for v in q.vertices:
            h = q.index(v)
            images = [m.maps[k] @ layer[q.index(a.tail)] for k, a in q.incoming(v)]
            stacked = hstack(f, images, m.dims[h]) if images else zeros(f, m.dims[h], 0)
            nxt.append(column_space_basis(stacked))
        layer = nxt
    return all(b.cols == 0 for b in layer)


# Hom and Ext

def _offsets(m: Representation, n: Representation) -> List[int]:
    offsets, acc = [], 0
    for i in range(m.quiver.n):
        offsets.append(acc)
        acc += n.dims[i] * m.dims[i]
    offsets.append(acc)
    return offsets


def hom_complex(m: Representation, n: Representation) -> Matrix:
    """The differential of the two-term complex computing Hom(m, n) and Ext^1(m, n)."""
    _check_compatible(m, n)
    q, f = m.quiver, m.field
    offsets = _offsets(m, n)
    ncols = offsets[-1]
    rows = []
    for arrow, x, y in zip(q.arrows, m.maps, n.maps):
        t, h = q.index(arrow.tail), q.index(arrow.head)
        mt, mh, nt, nh = m.dims[t], m.dims[h], n.dims[t], n.dims[h]
        for r in range(nh):
            for c in range(mt):
                row = [f.zero] * ncols
                # (f_h x)[r][c] = sum_k f_h[r][k] x[k][c]
                for k in range(mh):
                    coeff = x.entries[k][c]
                    if coeff:
                        idx = offsets[h] + r * mh + k
                        row[idx] = f.norm(row[idx] + coeff)
                # (y f_t)[r][c] = sum_k y[r][k] f_t[k][c]
                for k in range(nt):
                    coeff = y.entries[r][k]
                    if coeff:
                        idx = offsets[t] + k * mt + c
                        row[idx] = f.norm(row[idx] - coeff)
                rows.append(tuple(row))
    return Matrix(f, len(rows), ncols, tuple(rows))


def _vector_to_morphism(m: Representation, n: Representation, vec: Sequence, offsets: List[int]) -> Morphism:
    f = m.field
    blocks = []
    for i in range(m.quiver.n):
        rows, cols = n.dims[i], m.dims[i]
        start = offsets[i]
        blocks.append(Matrix(f, rows, cols, tuple(
            tuple(vec[start + r * cols + c] for c in range(cols)) for r in range(rows))))
    return tuple(blocks)


def hom_basis(m: Representation, n: Representation) -> HomBasis:
    d = hom_complex(m, n)
    k = kernel_basis(d)
    offsets = _offsets(m, n)
    basis = tuple(_vector_to_morphism(m, n, k.column(j), offsets) for j in range(k.cols))
    return HomBasis(m, n, basis)


def hom_dim(m: Representation, n: Representation) -> int:
    d = hom_complex(m, n)
    return d.cols - rank(d)


def end_dim(m: Representation) -> int:
    return hom_dim(m, m)


def ext1_dim(m: Representation, n: Representation) -> int:
    d = hom_complex(m, n)
    return d.rows - rank(d)


def _cocycle_from_vector(m: Representation, n: Representation, vec: Sequence) -> Tuple[Matrix, ...]:
    q, f = m.quiver, m.field
    blocks, pos = [], 0
    for arrow in q.arrows:
        rows, cols = n.dims[q.index(arrow.head)], m.dims[q.index(arrow.tail)]
        blocks.append(Matrix(f, rows, cols, tuple(
            tuple(f(vec[pos + r * cols + c]) for c in range(cols)) for r in range(rows))))
        pos += rows * cols
    return tuple(blocks)


def ext_classes(m: Representation, n: Representation) -> List[Tuple[Matrix, ...]]:
    """Cocycles (one per arrow, N_h x M_t) whose classes form a basis of Ext^1(m, n).

    The classes are the standard vectors completing the image of the complex,
    in echelon order, so the first one is always the same for the same input.
    """
    d = hom_complex(m, n)
    f = m.field
    classes = []
    for j in complement_basis(d):
        vec = [f.zero] * d.rows
        vec[j] = f.one
        classes.append(_cocycle_from_vector(m, n, vec))
    return classes


def combine_cocycles(f: Field, classes: Sequence[Tuple[Matrix, ...]], coeffs: Sequence) -> Tuple[Matrix, ...]:
    result = None
    for c, cocycle in zip(coeffs, classes):
        if not c:
            continue
        scaled = tuple(block.scale(c) for block in cocycle)
        result = scaled if result is None else tuple(a + b for a, b in zip(result, scaled))
    return result


def extension_rep(m: Representation, n: Representation, cocycle: Optional[Tuple[Matrix, ...]]) -> Representation:
    """Middle term E of 0 -> n -> E -> m -> 0 with E_i = n_i + m_i and e_w = [[y, c], [0, x]]."""
    _check_compatible(m, n)
    q, f = m.quiver, m.field
    dims = tuple(a + b for a, b in zip(n.dims, m.dims))
    maps = []
    for k, arrow in enumerate(q.arrows):
        t, h = q.index(arrow.tail), q.index(arrow.head)
        x, y = m.maps[k], n.maps[k]
        c = cocycle[k] if cocycle is not None else zeros(f, n.dims[h], m.dims[t])
        data = []
        for r in range(n.dims[h]):
            data.append(y.entries[r] + c.entries[r])
        for r in range(m.dims[h]):
            data.append((f.zero,) * n.dims[t] + x.entries[r])
        maps.append(Matrix(f, dims[h], dims[t], tuple(data)))
    return Representation(q, f, dims, tuple(maps))


# Morphisms, subobjects and quotients

def combine(m: Representation, n: Representation, basis: Sequence[Morphism], coeffs: Sequence) -> Morphism:
    f = m.field
    result = [zeros(f, n.dims[i], m.dims[i]) for i in range(m.quiver.n)]
    for c, phi in zip(coeffs, basis):
        if c:
            result = [a + b.scale(c) for a, b in zip(result, phi)]
    return tuple(result)


def is_morphism(m: Representation, n: Representation, phi: Morphism) -> bool:
    q = m.quiver
    for k, arrow in enumerate(q.arrows):
        t, h = q.index(arrow.tail), q.index(arrow.head)
        if phi[h] @ m.maps[k] != n.maps[k] @ phi[t]:
            return False
    return True


def is_iso_morphism(m: Representation, phi: Morphism) -> bool:
    return all(block.rows == block.cols and rank(block) == block.rows for block in phi)


def is_nilpotent_morphism(phi: Morphism) -> bool:
    return all(matrix_power(block, block.rows).is_zero() for block in phi)


def subrepresentation(m: Representation, basis: Sequence[Matrix]) -> Representation:
    """The subrepresentation on the column spaces of ``basis`` (independent columns per vertex)."""
    q, f = m.quiver, m.field
    dims = tuple(b.cols for b in basis)
    maps = []
    for k, arrow in enumerate(q.arrows):
        t, h = q.index(arrow.tail), q.index(arrow.head)
        image = m.maps[k] @ basis[t]
        restricted = solve(basis[h], image)
        if restricted is None:
            raise UsageError(f"subspace is not stable under arrow {arrow.id}")
        maps.append(restricted)
    return Representation(q, f, dims, tuple(maps))


def quotient_representation(m: Representation, basis: Sequence[Matrix]) -> Representation:
    """m modulo the stable graded subspace spanned by ``basis``."""
    q, f = m.quiver, m.field
    projections = [cokernel_projection(b) for b in basis]
    sections = []
    for p in projections:
        s = solve(p, identity(f, p.rows))
        if s is None:
            raise UsageError("projection onto the quotient is not surjective")
        sections.append(s)
    maps = []
    for k, arrow in enumerate(q.arrows):
        t, h = q.index(arrow.tail), q.index(arrow.head)
        if not (projections[h] @ m.maps[k] @ basis[t]).is_zero():
            raise UsageError(f"subspace is not stable under arrow {arrow.id}")
        maps.append(projections[h] @ m.maps[k] @ sections[t])
    dims = tuple(p.rows for p in projections)
    return Representation(q, f, dims, tuple(maps))


def image_basis(phi: Morphism) -> Tuple[Matrix, ...]:
    return tuple(column_space_basis(block) for block in phi)


def kernel_of(phi: Morphism) -> Tuple[Matrix, ...]:
    return tuple(kernel_basis(block) for block in phi)


# Isomorphism

def is_isomorphic(m: Representation, n: Representation, seed: int = 0,
                  trials: int = ISO_TRIALS, exhaustive_limit: int = ISO_EXHAUSTIVE_LIMIT) -> bool:
    """Search Hom(m, n) for an invertible element.

    Random combinations first, then every element when the Hom space is small over F_p.
    Over F_p with a large Hom space and no success this raises NeedsLargerField.
    Over Q only the random search runs, so False there is a Monte Carlo answer: the
    non-invertible maps form a hypersurface, and every trial misses it with high probability.
    """
    _check_compatible(m, n)
    if m.dims != n.dims:
        return False
    if m.total_dim == 0:
        return True
    hom = hom_basis(m, n)
    h = len(hom)
    if h == 0:
        return False
    if not (h == hom_dim(n, m) == end_dim(m) == end_dim(n)):
        return False
    f = m.field
    if h == 1:
        return is_iso_morphism(m, hom.basis[0])
    rng = random.Random(seed)
    for _ in range(trials):
        phi = hom.combination([f.random_element(rng) for _ in range(h)])
        if is_iso_morphism(m, phi):
            return True
    if not f.is_prime:
        return False
    if f.p ** h <= exhaustive_limit:
        for coeffs in itertools.product(f.elements(), repeat=h):
            if any(coeffs) and is_iso_morphism(m, hom.combination(coeffs)):
                return True
        return False
    raise NeedsLargerField(
        f"no invertible map found in a Hom space of dimension {h} over {f!r}; retry over a larger prime")


# Decomposition

_X = symbols("x")


def _charpoly_factors(f: Field, phi: Morphism) -> List[List]:
    """Distinct monic irreducible factors of the characteristic polynomial, as coefficient lists."""
    factors = {}
    for block in phi:
        if block.rows == 0:
            continue
        if f.is_prime:
            sym = SympyMatrix(block.rows, block.cols, [int(x) for row in block.entries for x in row])
            cp = Poly(sym.charpoly(_X).as_expr(), _X, modulus=f.p)
        else:
            sym = SympyMatrix(block.rows, block.cols,
                              [Rational(x.numerator, x.denominator) for row in block.entries for x in row])
            cp = Poly(sym.charpoly(_X).as_expr(), _X, domain="QQ")
        for factor, _ in cp.factor_list()[1]:
            coeffs = [f(int(c)) if f.is_prime else f(_rational_to_fraction(c)) for c in factor.all_coeffs()]
            lead = f.inv(coeffs[0])
            monic = tuple(f.norm(c * lead) for c in coeffs)
            factors[monic] = True
    return [list(c) for c in factors]


def _rational_to_fraction(c):
    c = Rational(c)
    return Fraction(int(c.p), int(c.q))


def _poly_of(f: Field, coeffs: Sequence, block: Matrix) -> Matrix:
    """Evaluate a polynomial (highest degree first) at a square matrix by Horner's rule."""
    result = zeros(f, block.rows, block.cols)
    ident = identity(f, block.rows)
    for c in coeffs:
        result = result @ block + ident.scale(c)
    return result


def _fitting_split(m: Representation, psi: Morphism) -> Optional[Tuple[Representation, Representation]]:
    """m = ker psi^N + im psi^N; None when one side is zero."""
    powered = tuple(matrix_power(block, block.rows) for block in psi)
    kernel = kernel_of(powered)
    image = image_basis(powered)
    if sum(b.cols for b in kernel) == 0 or sum(b.cols for b in image) == 0:
        return None
    return subrepresentation(m, kernel), subrepresentation(m, image)


def _try_split(m: Representation, phi: Morphism, residues: set) -> Optional[Tuple[Representation, Representation]]:
    """Split m with phi when possible; record the degrees of irreducible factors seen."""
    f = m.field
    if is_nilpotent_morphism(phi):
        return None
    if not is_iso_morphism(m, phi):
        return _fitting_split(m, phi)
    factors = _charpoly_factors(f, phi)
    residues.update(len(c) - 1 for c in factors)
    if len(factors) < 2:
        return None
    psi = tuple(_poly_of(f, factors[0], block) for block in phi)
    return _fitting_split(m, psi)


def _split_fully(m: Representation, rng: random.Random) -> List[Representation]:
    if m.total_dim == 0:
        return []
    end = hom_basis(m, m)
    h = len(end)
    if h == 1:
        return [m]
    f = m.field
    candidates = list(end.basis)
    candidates += [end.combination([f.random_element(rng) for _ in range(h)]) for _ in range(SPLIT_TRIALS)]
    residues = set()
    for phi in candidates:
        pieces = _try_split(m, phi, residues)
        if pieces is not None:
            logger.debug("split dims %s into %s + %s", m.dims, pieces[0].dims, pieces[1].dims)
            return _split_fully(pieces[0], rng) + _split_fully(pieces[1], rng)
    if f.is_prime and f.p ** h <= LOCAL_EXHAUSTIVE_LIMIT:
        for coeffs in itertools.product(f.elements(), repeat=h):
            phi = end.combination(coeffs)
            if not is_iso_morphism(m, phi) and not is_nilpotent_morphism(phi):
                a, b = _fitting_split(m, phi)
                return _split_fully(a, rng) + _split_fully(b, rng)
        return [m]
    if residues <= {1}:
        # every sampled endomorphism was nilpotent or scalar plus nilpotent
        return [m]
    raise NeedsLargerField(
        f"End of a representation of dims {m.dims} has residue field larger than {f!r}; "
        "retry over a larger prime")


def endomorphism_is_local(m: Representation, seed: int = 0) -> bool:
    return m.total_dim > 0 and len(_split_fully(m, random.Random(seed))) == 1


def indecompose(m: Representation, seed: int = 0) -> List[Tuple[Representation, int]]:
    """Pairwise nonisomorphic indecomposable summands with multiplicities."""
    rng = random.Random(seed)
    groups: List[List] = []
    for piece in _split_fully(m, rng):
        for group in groups:
            if group[0].dims == piece.dims and is_isomorphic(group[0], piece, seed):
                group[1] += 1
                break
        else:
            groups.append([piece, 1])
    return [(rep, mult) for rep, mult in groups]


def is_indecomposable(m: Representation, seed: int = 0) -> bool:
    if m.total_dim == 0:
        return False
    if end_dim(m) == 1:
        return True
    return len(_split_fully(m, random.Random(seed))) == 1


def orbit_dim(m: Representation) -> int:
    return sum(d * d for d in m.dims) - end_dim(m)


def register_tools(mcp):
    """Register the representation theory tool with the MCP server."""

    @mcp.tool()
    async def representation_theory(
        operation: str,
        rep: str,
        other: str = "",
        seed: int = 0,
    ) -> str:
        """
        Hom, Ext and decomposition of quiver representations given as Representation JSON.

        Args:
            operation: "dim_vector", "is_nilpotent", "hom_dim", "ext1_dim", "direct_sum",
                "is_isomorphic", "indecompose" or "orbit_dim"
            rep: Representation JSON {"quiver", "field", "dims", "maps"}
            other: second representation for binary operations
            seed: seed for randomized searches

        Returns:
            String with the result
        """
        binary = {"hom_dim", "ext1_dim", "direct_sum", "is_isomorphic"}
        valid_operations = {
            "dim_vector": lambda m, n: f"✅ dims = {dim_vector(m)}",
            "is_nilpotent": lambda m, n: f"✅ nilpotent: {is_nilpotent(m)}",
            "hom_dim": lambda m, n: f"✅ dim Hom = {hom_dim(m, n)}",
            "ext1_dim": lambda m, n: f"✅ dim Ext^1 = {ext1_dim(m, n)}",
            "direct_sum": lambda m, n: f"✅ {json.dumps(direct_sum(m, n).to_json())}",
            "is_isomorphic": lambda m, n: f"✅ isomorphic: {is_isomorphic(m, n, seed)}",
            "indecompose": lambda m, n: "✅ " + "; ".join(
                f"{mult} x dims {piece.dims}" for piece, mult in indecompose(m, seed)) if m.total_dim else "✅ zero representation",
            "orbit_dim": lambda m, n: f"✅ orbit dimension = {orbit_dim(m)}",
        }
        if operation not in valid_operations:
            return f"❌ Invalid operation '{operation}'. Valid operations: {', '.join(valid_operations)}"
        try:
            m = Representation.from_json(rep)
            n = None
            if operation in binary:
                if not other:
                    return f"❌ Operation '{operation}' requires parameter: other"
                n = Representation.from_json(other)
            return valid_operations[operation](m, n)
        except Exception as e:
            code = getattr(e, "code", "error")
            return f"❌ Error in {operation} [{code}]: {str(e)}"
