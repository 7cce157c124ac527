"""
Quiver Module for the Affine Quiver toolkit

Quivers and their combinatorics:
- affine-type recognition (extended Dynkin diagrams and cyclic quivers)
- Euler form, symmetric form and Cartan matrix
- the minimal imaginary root delta and the defect
- orientation surgery at a vertex and simple Weyl reflections
- admissible sink sequences and positive real roots below a bound

Dimension vectors are tuples of ints in declared vertex order.
"""

import json
import logging
from collections import deque
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache, reduce
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher
from sympy import Matrix as SympyMatrix, ilcm

try:
    from .errors import NoAdmissibleOrder, NotAffine, ParseError, UsageError
except ImportError:
    from errors import NoAdmissibleOrder, NotAffine, ParseError, UsageError


logger = logging.getLogger(__name__)

DimVector = Tuple[int, ...]


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Quiver:
    """A quiver (I, Omega, h, t): vertex ids in order plus arrows in order."""

    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    _index: Dict[str, int] = dataclass_field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise UsageError("vertex ids must be unique")
        if len({a.id for a in self.arrows}) != len(self.arrows):
            raise UsageError("arrow ids must be unique")
        index = {v: k for k, v in enumerate(self.vertices)}
        for a in self.arrows:
            if a.tail not in index or a.head not in index:
                raise UsageError(f"arrow {a.id} uses an unknown vertex")
            if a.tail == a.head:
                raise UsageError(f"arrow {a.id} is a loop")
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, vertex) -> int:
        try:
            return self._index[str(vertex)]
        except KeyError:
            raise UsageError(f"unknown vertex {vertex!r}")

    def incoming(self, vertex) -> List[Tuple[int, Arrow]]:
        v = self.vertices[self.index(vertex)]
        return [(k, a) for k, a in enumerate(self.arrows) if a.head == v]

    def outgoing(self, vertex) -> List[Tuple[int, Arrow]]:
        v = self.vertices[self.index(vertex)]
        return [(k, a) for k, a in enumerate(self.arrows) if a.tail == v]

    def is_sink(self, vertex) -> bool:
        return not self.outgoing(vertex)

    def is_source(self, vertex) -> bool:
        return not self.incoming(vertex)

    def sinks(self) -> List[str]:
        return [v for v in self.vertices if self.is_sink(v)]

    def underlying_graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((a.tail, a.head) for a in self.arrows)
        return g

    def digraph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((a.tail, a.head) for a in self.arrows)
        return g

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.digraph())

    def zero_vector(self) -> DimVector:
        return (0,) * self.n

    def unit_vector(self, vertex) -> DimVector:
        k = self.index(vertex)
        return tuple(1 if j == k else 0 for j in range(self.n))

    def check_vector(self, a: Sequence[int]) -> DimVector:
        if len(a) != self.n:
            raise UsageError(f"dimension vector {tuple(a)} does not match {self.n} vertices")
        return tuple(int(x) for x in a)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"id": a.id, "tail": a.tail, "head": a.head} for a in self.arrows],
        }

    @classmethod
    def from_json(cls, data) -> "Quiver":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise ParseError(f"quiver is not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}")
        if not isinstance(data, dict):
            raise ParseError("quiver must be a JSON object")
        for key in ("vertices", "arrows"):
            if key not in data:
                raise ParseError(f"quiver is missing key '{key}'")
        arrows = []
        for k, raw in enumerate(data["arrows"]):
            for key in ("id", "tail", "head"):
                if not isinstance(raw, dict) or key not in raw:
                    raise ParseError(f"arrow #{k} is missing key '{key}'")
            arrows.append(Arrow(str(raw["id"]), str(raw["tail"]), str(raw["head"])))
        try:
            return cls(tuple(str(v) for v in data["vertices"]), tuple(arrows))
        except UsageError as e:
            raise ParseError(str(e))

    def content_hash_source(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def make_quiver(vertices: Sequence, arrows: Sequence[Tuple]) -> Quiver:
    """Build a quiver from vertex ids and (tail, head) or (id, tail, head) tuples."""
    built = []
    for k, a in enumerate(arrows):
        if len(a) == 2:
            built.append(Arrow(f"a{k + 1}", str(a[0]), str(a[1])))
        else:
            built.append(Arrow(str(a[0]), str(a[1]), str(a[2])))
    return Quiver(tuple(str(v) for v in vertices), tuple(built))


def kronecker() -> Quiver:
    return make_quiver(["1", "2"], [("a", "1", "2"), ("b", "1", "2")])


def cyclic_quiver(p: int) -> Quiver:
    """C_p: vertices 0..p-1 and arrows w_z from z to z-1."""
    if p < 2:
        raise UsageError("cyclic quivers need at least two vertices")
    return make_quiver([str(z) for z in range(p)], [(f"w{z}", str(z), str((z - 1) % p)) for z in range(p)])


# Affine classification

@dataclass(frozen=True)
class AffineClass:
    family: str
    rank: int
    certificate: Tuple[Tuple[str, int], ...]

    @property
    def name(self) -> str:
        if self.family == "cyclic":
            return f"cyclic({self.rank})"
        return f"{self.family}~({self.rank})"

    @property
    def is_cyclic(self) -> bool:
        return self.family == "cyclic"

    def __str__(self):
        return self.name


def _cycle_graph(n: int) -> nx.MultiGraph:
    g = nx.MultiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((k, (k + 1) % n) for k in range(n))
    return g


def _star_graph(arms: Sequence[int]) -> nx.MultiGraph:
    """Center 0 with arms of the given lengths."""
    g = nx.MultiGraph()
    g.add_node(0)
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(length):
            g.add_edge(prev, nxt)
            prev = nxt
            nxt += 1
    return g


def _d_tilde(m: int) -> nx.MultiGraph:
    """D~_m on m+1 vertices: a path of m-3 vertices with two leaves at each end."""
    if m == 4:
        return _star_graph([1, 1, 1, 1])
    g = nx.MultiGraph()
    path = list(range(m - 3))
    g.add_nodes_from(path)
    g.add_edges_from(zip(path, path[1:]))
    leaf = m - 3
    for end in (path[0], path[-1]):
        for _ in range(2):
            g.add_edge(end, leaf)
            leaf += 1
    return g


def _standard_diagrams(n: int) -> List[Tuple[str, int, nx.MultiGraph]]:
    candidates = []
    if n >= 2:
        candidates.append(("A", n - 1, _cycle_graph(n)))
    if n >= 5:
        candidates.append(("D", n - 1, _d_tilde(n - 1)))
    if n == 7:
        candidates.append(("E", 6, _star_graph([2, 2, 2])))
    if n == 8:
        candidates.append(("E", 7, _star_graph([1, 3, 3])))
    if n == 9:
        candidates.append(("E", 8, _star_graph([1, 2, 5])))
    return candidates


def _cyclic_certificate(q: Quiver) -> Optional[Dict[str, int]]:
    if q.n < 2 or len(q.arrows) != q.n:
        return None
    succ = {}
    for v in q.vertices:
        out, inc = q.outgoing(v), q.incoming(v)
        if len(out) != 1 or len(inc) != 1:
            return None
        succ[v] = out[0][1].head
    labels = {}
    v, z = q.vertices[0], 0
    while v not in labels:
        labels[v] = z
        v, z = succ[v], (z - 1) % q.n
    return labels if len(labels) == q.n else None


@lru_cache(maxsize=256)
def classify_graph(q: Quiver) -> AffineClass:
    """Name the affine family of q, with a vertex bijection to the standard diagram."""
    cyclic = _cyclic_certificate(q)
    if cyclic is not None:
        return AffineClass("cyclic", q.n, tuple(sorted(cyclic.items(), key=lambda kv: q.index(kv[0]))))
    g = q.underlying_graph()
    if q.n == 0 or not nx.is_connected(g):
        raise NotAffine("quiver is empty or disconnected")
    for family, rank_, standard in _standard_diagrams(q.n):
        if standard.number_of_edges() != g.number_of_edges():
            continue
        matcher = GraphMatcher(g, standard)
        if matcher.is_isomorphic():
            cert = tuple((v, int(matcher.mapping[v])) for v in q.vertices)
            logger.debug("classified %d-vertex quiver as %s~(%d)", q.n, family, rank_)
            return AffineClass(family, rank_, cert)
    raise NotAffine(f"underlying graph of this {q.n}-vertex quiver is not an extended Dynkin diagram")


# Forms and roots

def euler_form(q: Quiver, a: Sequence[int], b: Sequence[int]) -> int:
    a, b = q.check_vector(a), q.check_vector(b)
    value = sum(x * y for x, y in zip(a, b))
    for arrow in q.arrows:
        value -= a[q.index(arrow.tail)] * b[q.index(arrow.head)]
    return value


def symmetric_form(q: Quiver, a: Sequence[int], b: Sequence[int]) -> int:
    return euler_form(q, a, b) + euler_form(q, b, a)


@lru_cache(maxsize=256)
def cartan_matrix(q: Quiver) -> Tuple[Tuple[int, ...], ...]:
    c = [[2 if i == j else 0 for j in range(q.n)] for i in range(q.n)]
    for arrow in q.arrows:
        i, j = q.index(arrow.tail), q.index(arrow.head)
        c[i][j] -= 1
        c[j][i] -= 1
    return tuple(tuple(row) for row in c)


def rep_space_dim(q: Quiver, nu: Sequence[int]) -> int:
    """dim E_{V,Omega}: one matrix entry per arrow and pair of basis vectors."""
    nu = q.check_vector(nu)
    return sum(nu[q.index(a.tail)] * nu[q.index(a.head)] for a in q.arrows)


@lru_cache(maxsize=256)
def minimal_imaginary_root(q: Quiver) -> DimVector:
    classify_graph(q)
    null = SympyMatrix(cartan_matrix(q)).nullspace()
    if len(null) != 1:
        raise NotAffine("Cartan matrix does not have a one-dimensional radical")
    vec = list(null[0])
    denom = reduce(ilcm, (x.q for x in vec), 1)
    ints = [int(x * denom) for x in vec]
    g = reduce(gcd, (abs(x) for x in ints))
    ints = [x // g for x in ints]
    if all(x <= 0 for x in ints):
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        raise NotAffine("radical vector is not sincere")
    return tuple(ints)


def defect(q: Quiver, a: Sequence[int]) -> int:
    """<delta, a>: negative on preprojectives, positive on preinjectives."""
    if classify_graph(q).is_cyclic:
        raise UsageError("defect is only defined for acyclic affine quivers")
    return euler_form(q, minimal_imaginary_root(q), a)


def reflect_quiver(q: Quiver, i) -> Quiver:
    v = q.vertices[q.index(i)]
    arrows = tuple(
        Arrow(a.id, a.head, a.tail) if v in (a.tail, a.head) else a for a in q.arrows
    )
    return Quiver(q.vertices, arrows)


def weyl_reflect(q: Quiver, i, a: Sequence[int]) -> DimVector:
    """s_i(a) = a - (a, alpha_i) alpha_i."""
    a = q.check_vector(a)
    k = q.index(i)
    c = cartan_matrix(q)
    pairing = sum(a[j] * c[j][k] for j in range(q.n))
    return tuple(x - pairing if j == k else x for j, x in enumerate(a))


@lru_cache(maxsize=256)
def admissible_sink_sequence(q: Quiver) -> Tuple[str, ...]:
    """(i_1, ..., i_n) with each i_r a sink of sigma_{i_{r-1}} ... sigma_{i_1} q."""
    if not q.is_acyclic():
        raise NoAdmissibleOrder("quiver has an oriented cycle")
    current, used, order = q, set(), []
    for _ in range(q.n):
        v = next(v for v in current.vertices if v not in used and current.is_sink(v))
        order.append(v)
        used.add(v)
        current = reflect_quiver(current, v)
    return tuple(order)


def coxeter_vector(q: Quiver, a: Sequence[int], inverse: bool = False) -> DimVector:
    """Dimension-level Coxeter transformation matching the Coxeter functors."""
    seq = admissible_sink_sequence(q)
    a = q.check_vector(a)
    for v in (reversed(seq) if inverse else seq):
        a = weyl_reflect(q, v, a)
    return a


def is_below(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def positive_real_roots_below(q: Quiver, bound: Sequence[int]) -> List[DimVector]:
    """Positive real roots alpha <= bound, by closing the simple roots under reflections."""
    classify_graph(q)
    bound = q.check_vector(bound)
    seen = set()
    queue = deque()
    for v in q.vertices:
        e = q.unit_vector(v)
        if is_below(e, bound):
            seen.add(e)
            queue.append(e)
    while queue:
        root = queue.popleft()
        for v in q.vertices:
            image = weyl_reflect(q, v, root)
            if image in seen or any(x < 0 for x in image) or not is_below(image, bound):
                continue
            seen.add(image)
            queue.append(image)
    return sorted(seen)


def parse_dim_vector(q: Quiver, text) -> DimVector:
    """Read "1,2,0" (declared vertex order), a list, or a {vertex: n} object."""
    if isinstance(text, dict):
        return tuple(int(text.get(v, 0)) for v in q.vertices)
    if isinstance(text, str):
        stripped = text.strip().strip("()[]")
        try:
            values = [int(x) for x in stripped.split(",")] if stripped else []
        except ValueError:
            raise ParseError(f"cannot read dimension vector {text!r}")
    else:
        values = list(text)
    if len(values) != q.n or any(x < 0 for x in values):
        raise ParseError(f"dimension vector {text!r} needs {q.n} nonnegative entries")
    return tuple(values)


def register_tools(mcp):
    """Register the quiver structure tool with the MCP server."""

    @mcp.tool()
    async def quiver_structure(
        operation: str,
        quiver: str,
        vertex: str = "",
        a: str = "",
        b: str = "",
    ) -> str:
        """
        Combinatorics of a quiver given as JSON {"vertices": [...], "arrows": [{"id","tail","head"}]}.

        Args:
            operation: "classify_graph", "euler_form", "cartan_matrix", "minimal_imaginary_root",
                "defect", "reflect_quiver", "weyl_reflect", "admissible_sink_sequence",
                "positive_real_roots_below" or "rep_space_dim"
            quiver: quiver JSON
            vertex: vertex id for reflections
            a: dimension vector as a comma list in vertex order (also the bound for roots)
            b: second dimension vector for the Euler form

        Returns:
            String with the result
        """
        valid_operations = {
            "classify_graph": lambda q: f"✅ {classify_graph(q)}",
            "euler_form": lambda q: f"✅ <{a}, {b}> = {euler_form(q, parse_dim_vector(q, a), parse_dim_vector(q, b))}",
            "cartan_matrix": lambda q: f"✅ {[list(r) for r in cartan_matrix(q)]}",
            "minimal_imaginary_root": lambda q: f"✅ delta = {minimal_imaginary_root(q)}",
            "defect": lambda q: f"✅ defect{parse_dim_vector(q, a)} = {defect(q, parse_dim_vector(q, a))}",
            "reflect_quiver": lambda q: f"✅ {json.dumps(reflect_quiver(q, vertex).to_json())}",
            "weyl_reflect": lambda q: f"✅ s_{vertex}{parse_dim_vector(q, a)} = {weyl_reflect(q, vertex, parse_dim_vector(q, a))}",
            "admissible_sink_sequence": lambda q: f"✅ {list(admissible_sink_sequence(q))}",
            "positive_real_roots_below": lambda q: f"✅ {positive_real_roots_below(q, parse_dim_vector(q, a))}",
            "rep_space_dim": lambda q: f"✅ dim E = {rep_space_dim(q, parse_dim_vector(q, a))}",
        }
        if operation not in valid_operations:
            return f"❌ Invalid operation '{operation}'. Valid operations: {', '.join(valid_operations)}"
        try:
            return valid_operations[operation](Quiver.from_json(quiver))
        except Exception as e:
            code = getattr(e, "code", "error")
            return f"❌ Error in {operation} [{code}]: {str(e)}"
