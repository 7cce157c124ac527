"""
Reflection Functors Module for the Affine Quiver toolkit

BGP reflection functors at sinks and sources, the Coxeter functors built from an
admissible sink sequence, the standard modules S_i, P(i_r), I(i_r), and the split
of indecomposables into preprojective, regular and preinjective classes.

Kernels and cokernels come from the echelon bases in exactfield, so the functors
are reproducible on the nose; statements about them are made up to isomorphism.
"""

import json
import logging
from dataclasses import dataclass
from typing import Optional

try:
    from .errors import InternalError, UsageError
    from .exactfield import Field, cokernel_projection, hstack, kernel_basis, submatrix, vstack, zeros
    from .quiver import Quiver, admissible_sink_sequence, defect, reflect_quiver
    from .rep import Representation, is_indecomposable, is_isomorphic
except ImportError:
    from errors import InternalError, UsageError
    from exactfield import Field, cokernel_projection, hstack, kernel_basis, submatrix, vstack, zeros
    from quiver import Quiver, admissible_sink_sequence, defect, reflect_quiver
    from rep import Representation, is_indecomposable, is_isomorphic


logger = logging.getLogger(__name__)

PREPROJECTIVE = "preprojective"
PREINJECTIVE = "preinjective"
REGULAR_INHOMOGENEOUS = "regular_inhomogeneous"
REGULAR_HOMOGENEOUS = "regular_homogeneous"


def simple_rep(q: Quiver, i, f: Field) -> Representation:
    dims = q.unit_vector(i)
    maps = tuple(zeros(f, dims[q.index(a.head)], dims[q.index(a.tail)]) for a in q.arrows)
    return Representation(q, f, dims, maps)


def _check_on(q: Quiver, m: Representation):
    if m.quiver != q:
        raise UsageError("representation does not live on the given quiver")


def reflection_plus(q: Quiver, i, m: Representation) -> Representation:
    """Phi_i^+ at a sink i: W_i is the kernel of the sum of the incoming maps."""
    _check_on(q, m)
    if not q.is_sink(i):
        raise UsageError(f"vertex {i} is not a sink")
    f = m.field
    k = q.index(i)
    incoming = q.incoming(i)
    sizes = [m.dims[q.index(a.tail)] for _, a in incoming]
    total = hstack(f, [m.maps[j] for j, _ in incoming], m.dims[k]) if incoming else zeros(f, m.dims[k], 0)
    kernel = kernel_basis(total)
    new_q = reflect_quiver(q, i)
    dims = tuple(kernel.cols if j == k else d for j, d in enumerate(m.dims))
    maps = list(m.maps)
    offset = 0
    for (j, _), size in zip(incoming, sizes):
        maps[j] = submatrix(kernel, range(offset, offset + size), range(kernel.cols))
        offset += size
    return Representation(new_q, f, dims, tuple(maps))


def reflection_minus(q: Quiver, i, m: Representation) -> Representation:
    """Phi_i^- at a source i: W_i is the cokernel of the stacked outgoing maps."""
    _check_on(q, m)
    if not q.is_source(i):
        raise UsageError(f"vertex {i} is not a source")
    f = m.field
    k = q.index(i)
    outgoing = q.outgoing(i)
    sizes = [m.dims[q.index(a.head)] for _, a in outgoing]
    total = vstack(f, [m.maps[j] for j, _ in outgoing], m.dims[k]) if outgoing else zeros(f, 0, m.dims[k])
    projection = cokernel_projection(total)
    new_q = reflect_quiver(q, i)
    dims = tuple(projection.rows if j == k else d for j, d in enumerate(m.dims))
    maps = list(m.maps)
    offset = 0
    for (j, _), size in zip(outgoing, sizes):
        maps[j] = submatrix(projection, range(projection.rows), range(offset, offset + size))
        offset += size
    return Representation(new_q, f, dims, tuple(maps))


def coxeter_plus(q: Quiver, m: Representation, power: int = 1) -> Representation:
    _check_on(q, m)
    seq = admissible_sink_sequence(q)
    current = m
    for _ in range(power):
        for v in seq:
            current = reflection_plus(current.quiver, v, current)
    return current


def coxeter_minus(q: Quiver, m: Representation, power: int = 1) -> Representation:
    _check_on(q, m)
    seq = admissible_sink_sequence(q)
    current = m
    for _ in range(power):
        for v in reversed(seq):
            current = reflection_minus(current.quiver, v, current)
    return current


def _partial_quiver(q: Quiver, seq, r: int) -> Quiver:
    """sigma_{i_r} ... sigma_{i_1} q."""
    current = q
    for v in seq[:r]:
        current = reflect_quiver(current, v)
    return current


def projective_rep(q: Quiver, r: int, f: Field) -> Representation:
    """P(i_r) = Phi_{i_1}^- ... Phi_{i_{r-1}}^- S_{i_r}, with r counted from 1."""
    seq = admissible_sink_sequence(q)
    if not 1 <= r <= len(seq):
        raise UsageError(f"index {r} outside 1..{len(seq)}")
    current = simple_rep(_partial_quiver(q, seq, r - 1), seq[r - 1], f)
    for v in reversed(seq[:r - 1]):
        current = reflection_minus(current.quiver, v, current)
    return current


def injective_rep(q: Quiver, r: int, f: Field) -> Representation:
    """I(i_r) = Phi_{i_n}^+ ... Phi_{i_{r+1}}^+ S_{i_r}, with r counted from 1."""
    seq = admissible_sink_sequence(q)
    if not 1 <= r <= len(seq):
        raise UsageError(f"index {r} outside 1..{len(seq)}")
    current = simple_rep(_partial_quiver(q, seq, r), seq[r - 1], f)
    for v in seq[r:]:
        current = reflection_plus(current.quiver, v, current)
    return current


@dataclass(frozen=True)
class ClassifiedModule:
    rep: Representation
    kind: str
    defect: int
    period: Optional[int] = None
    projective: bool = False
    injective: bool = False

    @property
    def is_regular(self) -> bool:
        return self.kind in (REGULAR_HOMOGENEOUS, REGULAR_INHOMOGENEOUS)

    def describe(self) -> str:
        text = self.kind.replace("_", " ")
        if self.kind == REGULAR_INHOMOGENEOUS:
            text += f" (period {self.period})"
        elif self.projective:
            text += " (projective)"
        elif self.injective:
            text += " (injective)"
        return f"{text}, defect {self.defect}"

    def to_json(self) -> dict:
        return {"class": self.kind, "period": self.period, "defect": self.defect,
                "dims": list(self.rep.dims), "projective": self.projective, "injective": self.injective}


def iteration_cap(q: Quiver, m: Representation) -> int:
    return m.total_dim + q.n + 2


def period_of(q: Quiver, m: Representation, seed: int = 0) -> int:
    """Least r >= 1 with (Phi^+)^r m isomorphic to m, for a regular indecomposable m."""
    current = m
    for r in range(1, iteration_cap(q, m) + 1):
        current = coxeter_plus(q, current)
        if current.dims == m.dims and is_isomorphic(current, m, seed):
            return r
    raise InternalError(f"no Coxeter period found for regular module of dims {m.dims}")


def classify(q: Quiver, m: Representation, seed: int = 0, verify: bool = False) -> ClassifiedModule:
    """Classify an indecomposable by the sign of its defect, optionally cross-checked."""
    _check_on(q, m)
    if not is_indecomposable(m, seed):
        raise UsageError("classify expects an indecomposable representation")
    d = defect(q, m.dims)
    if d < 0:
        result = ClassifiedModule(m, PREPROJECTIVE, d, projective=coxeter_plus(q, m).is_zero())
    elif d > 0:
        result = ClassifiedModule(m, PREINJECTIVE, d, injective=coxeter_minus(q, m).is_zero())
    else:
        period = period_of(q, m, seed)
        kind = REGULAR_HOMOGENEOUS if period == 1 else REGULAR_INHOMOGENEOUS
        result = ClassifiedModule(m, kind, d, period=period)
    if verify:
        _verify_by_iteration(q, result)
    return result


def _verify_by_iteration(q: Quiver, result: ClassifiedModule):
    cap = iteration_cap(q, result.rep)
    if result.kind == PREPROJECTIVE:
        step = coxeter_plus
    elif result.kind == PREINJECTIVE:
        step = coxeter_minus
    else:
        back = coxeter_minus(q, coxeter_plus(q, result.rep))
        if not is_isomorphic(back, result.rep):
            raise InternalError("Phi^- Phi^+ does not fix a regular module")
        return
    current = result.rep
    for _ in range(cap):
        current = step(q, current)
        if current.is_zero():
            return
    raise InternalError(f"{result.kind} module of dims {result.rep.dims} survived {cap} Coxeter steps")


def _position(q: Quiver, m: Representation, step, base) -> tuple:
    current, k = m, 0
    cap = iteration_cap(q, m)
    while True:
        nxt = step(q, current)
        if nxt.is_zero():
            break
        current, k = nxt, k + 1
        if k > cap:
            raise UsageError(f"module of dims {m.dims} is not killed by a power of the Coxeter functor")
    seq = admissible_sink_sequence(q)
    for r in range(1, len(seq) + 1):
        if base(q, r, m.field).dims == current.dims:
            return k, r
    raise InternalError(f"Coxeter iterate of dims {current.dims} is not a standard module")


def preprojective_position(q: Quiver, m: Representation) -> tuple:
    """(k, r) with m ~ (Phi^-)^k P(i_r)."""
    return _position(q, m, coxeter_plus, projective_rep)


def preinjective_position(q: Quiver, m: Representation) -> tuple:
    """(k, r) with m ~ (Phi^+)^k I(i_r)."""
    return _position(q, m, coxeter_minus, injective_rep)


def register_tools(mcp):
    """Register the reflection functor tool with the MCP server."""

    @mcp.tool()
    async def reflection_functors(
        operation: str,
        quiver: str,
        rep: str = "",
        vertex: str = "",
        index: int = 1,
        power: int = 1,
        field: str = "17",
        seed: int = 0,
    ) -> str:
        """
        BGP reflection and Coxeter functors on quiver representations.

        Args:
            operation: "simple_rep", "reflection_plus", "reflection_minus", "coxeter_plus",
                "coxeter_minus", "projective_rep", "injective_rep" or "classify"
            quiver: quiver JSON the representation lives on
            rep: Representation JSON (its own quiver entry is ignored)
            vertex: vertex for simples and single reflections
            index: position r (from 1) in the admissible sink sequence for P(i_r) and I(i_r)
            power: number of Coxeter applications
            field: prime or "Q" for constructed modules
            seed: seed for isomorphism searches

        Returns:
            String with the result
        """
        def _load(q):
            if not rep:
                raise UsageError(f"operation '{operation}' requires parameter: rep")
            return Representation.from_json(rep, quiver=q)

        def _field():
            return Field(None) if field.strip().upper() in ("Q", "RATIONAL") else Field(int(field))

        def _render(m):
            return f"✅ dims {m.dims}: {json.dumps(m.to_json())}"

        valid_operations = {
            "simple_rep": lambda q: _render(simple_rep(q, vertex, _field())),
            "reflection_plus": lambda q: _render(reflection_plus(q, vertex, _load(q))),
            "reflection_minus": lambda q: _render(reflection_minus(q, vertex, _load(q))),
            "coxeter_plus": lambda q: _render(coxeter_plus(q, _load(q), power)),
            "coxeter_minus": lambda q: _render(coxeter_minus(q, _load(q), power)),
            "projective_rep": lambda q: _render(projective_rep(q, index, _field())),
            "injective_rep": lambda q: _render(injective_rep(q, index, _field())),
            "classify": lambda q: f"✅ {classify(q, _load(q), seed).describe()}",
        }
        if operation not in valid_operations:
            return f"❌ Invalid operation '{operation}'. Valid operations: {', '.join(valid_operations)}"
        try:
            return valid_operations[operation](Quiver.from_json(quiver))
        except Exception as e:
            code = getattr(e, "code", "error")
            return f"❌ Error in {operation} [{code}]: {str(e)}"
