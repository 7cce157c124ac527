"""
Tube Analysis Module for the Affine Quiver toolkit

Inhomogeneous tubes of an acyclic affine quiver and the Hall functor
F: Rep(C_p) -> tube, together with the cyclic-quiver side of the picture:
- discovery of regular simples R_0..R_{p-1} and their extension maps l_{z,w}
- the cyclic representations s_z, t_lambda and s_{z,l}
- F on objects and morphisms
- aperiodicity on both sides and the Hom-dimension transport check

Tube simples are indexed so that Ext^1(R_z, R_{z-1}) is one-dimensional.
"""

import json
import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

try:
    from .config import SAMPLING_BUDGET
    from .errors import InternalError, NeedsLargerField, UsageError
    from .exactfield import Field, Matrix, block_matrix, identity, kron, parse_matrix, rank
    from .functors import (
        PREINJECTIVE, PREPROJECTIVE, classify, coxeter_plus, preinjective_position, preprojective_position,
    )
    from .quiver import (
        Quiver, admissible_sink_sequence, coxeter_vector, cyclic_quiver, defect,
        is_below, minimal_imaginary_root, positive_real_roots_below,
    )
    from .rep import (
        Representation, direct_sum, end_dim, ext1_dim, ext_classes, hom_dim, indecompose,
        is_isomorphic, is_nilpotent, random_rep,
    )
except ImportError:
    from config import SAMPLING_BUDGET
    from errors import InternalError, NeedsLargerField, UsageError
    from exactfield import Field, Matrix, block_matrix, identity, kron, parse_matrix, rank
    from functors import (
        PREINJECTIVE, PREPROJECTIVE, classify, coxeter_plus, preinjective_position, preprojective_position,
    )
    from quiver import (
        Quiver, admissible_sink_sequence, coxeter_vector, cyclic_quiver, defect,
        is_below, minimal_imaginary_root, positive_real_roots_below,
    )
    from rep import (
        Representation, direct_sum, end_dim, ext1_dim, ext_classes, hom_dim, indecompose,
        is_isomorphic, is_nilpotent, random_rep,
    )


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tube:
    quiver: Quiver
    field: Field
    period: int
    simples: Tuple[Representation, ...]
    ext_maps: Optional[Tuple[Tuple[Matrix, ...], ...]] = None

    def simple(self, z: int) -> Representation:
        return self.simples[z % self.period]

    def dims_of(self, z: int, length: int) -> Tuple[int, ...]:
        """Dimension vector of the tube module with socle R_z and the given length."""
        total = [0] * self.quiver.n
        for j in range(length):
            for k, d in enumerate(self.simple(z + j).dims):
                total[k] += d
        return tuple(total)

    def to_json(self) -> dict:
        data = {"period": self.period, "simples": [s.to_json() for s in self.simples]}
        if self.ext_maps is not None:
            data["ext_maps"] = {
                str(z): {a.id: m.tolist(encode=True) for a, m in zip(self.quiver.arrows, row)}
                for z, row in enumerate(self.ext_maps)
            }
        return data

    @classmethod
    def from_json(cls, data, quiver: Quiver, field: Field) -> "Tube":
        simples = tuple(Representation.from_json(s, quiver=quiver, field=field) for s in data["simples"])
        period = int(data["period"])
        ext_maps = None
        if "ext_maps" in data:
            rows = []
            for z in range(period):
                raw = data["ext_maps"][str(z)]
                src, dst = simples[z], simples[(z - 1) % period]
                rows.append(tuple(
                    parse_matrix(field, raw[a.id], dst.dims[quiver.index(a.head)], src.dims[quiver.index(a.tail)])
                    for a in quiver.arrows))
            ext_maps = tuple(rows)
        return cls(quiver, field, period, simples, ext_maps)


@dataclass(frozen=True)
class CyclicRep:
    """(V, theta) on C_p: graded pieces V_z and maps theta_z: V_z -> V_{z-1}."""

    p: int
    field: Field
    dims: Tuple[int, ...]
    maps: Tuple[Matrix, ...]

    def __post_init__(self):
        if self.p < 2 or len(self.dims) != self.p or len(self.maps) != self.p:
            raise UsageError("cyclic representation needs p >= 2 graded pieces and p maps")
        for z, m in enumerate(self.maps):
            expected = (self.dims[(z - 1) % self.p], self.dims[z])
            if m.shape != expected:
                raise UsageError(f"theta_{z} has shape {m.shape}, expected {expected}")

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def to_representation(self) -> Representation:
        return Representation(cyclic_quiver(self.p), self.field, self.dims, self.maps)

    @classmethod
    def from_representation(cls, m: Representation) -> "CyclicRep":
        p = m.quiver.n
        if m.quiver != cyclic_quiver(p):
            raise UsageError("representation does not live on the standard cyclic quiver")
        return cls(p, m.field, m.dims, m.maps)


def cyclic_direct_sum(*reps: CyclicRep) -> CyclicRep:
    return CyclicRep.from_representation(direct_sum(*(r.to_representation() for r in reps)))


def cyclic_simple(p: int, z: int, f: Field) -> CyclicRep:
    return cyclic_indec(p, z, 1, f)


def cyclic_t_lambda(p: int, lam, f: Field) -> CyclicRep:
    """All pieces one-dimensional; identity maps except lambda on the arrow 0 -> p-1."""
    lam = f(lam)
    if lam == 0:
        raise UsageError("t_lambda needs a nonzero scalar")
    maps = tuple(Matrix(f, 1, 1, ((lam if z == 0 else f.one,),)) for z in range(p))
    return CyclicRep(p, f, (1,) * p, maps)


def cyclic_indec(p: int, z: int, length: int, f: Field) -> CyclicRep:
    """s_{z,l}: basis b_0..b_{l-1} with b_j in degree z+j and theta(b_j) = b_{j-1}."""
    if length < 1:
        raise UsageError("length must be at least 1")
    if p < 2:
        raise UsageError("cyclic quivers need p >= 2")
    z %= p
    positions: List[List[int]] = [[] for _ in range(p)]
    for j in range(length):
        positions[(z + j) % p].append(j)
    dims = tuple(len(ps) for ps in positions)
    maps = []
    for v in range(p):
        src, dst = positions[v], positions[(v - 1) % p]
        data = [[f.zero] * len(src) for _ in range(len(dst))]
        for col, j in enumerate(src):
            if j >= 1:
                data[dst.index(j - 1)][col] = f.one
        maps.append(Matrix(f, len(dst), len(src), tuple(tuple(r) for r in data)))
    return CyclicRep(p, f, dims, tuple(maps))


def cyclic_decompose(m: CyclicRep) -> Dict[Tuple[int, int], int]:
    """Multiplicities of s_{z,l} in a nilpotent cyclic representation, from path ranks."""
    if not is_nilpotent(m.to_representation()):
        raise UsageError("cyclic decomposition needs a nilpotent representation")
    p, f = m.p, m.field
    longest = m.total_dim + 2
    # ranks[k][z] = rank of the path V_{z+k} -> V_z of length k
    ranks = []
    paths = [identity(f, d) for d in m.dims]
    for k in range(longest + 1):
        ranks.append([paths[z].cols if k == 0 else rank(paths[z]) for z in range(p)])
        paths = [paths[z] @ m.maps[(z + k + 1) % p] for z in range(p)]
    counts = {}
    for length in range(1, longest):
        k = length - 1
        for z in range(p):
            mult = ranks[k][z] - ranks[k + 1][z] - ranks[k + 1][(z - 1) % p] + ranks[k + 2][(z - 1) % p]
            if mult:
                counts[(z, length)] = mult
    return counts


def is_aperiodic_cyclic(m: CyclicRep) -> bool:
    """No length l has all of s_{0,l}, ..., s_{p-1,l} among the summands."""
    socles: Dict[int, set] = {}
    for (z, length) in cyclic_decompose(m):
        socles.setdefault(length, set()).add(z)
    return all(len(zs) < m.p for zs in socles.values())


# Tube discovery

def _sample_indecomposable(q: Quiver, f: Field, dims, rng: random.Random) -> Representation:
    """A representation of a real-root dimension with End = K and no self-extensions."""
    for _ in range(SAMPLING_BUDGET):
        m = random_rep(q, f, dims, rng)
        if end_dim(m) == 1 and ext1_dim(m, m) == 0:
            return m
    raise NeedsLargerField(f"no rigid indecomposable of dims {dims} found over {f!r}")


def _order_orbit(orbit: List[Representation]) -> List[Representation]:
    """Index an orbit so that Ext^1(R_z, R_{z-1}) != 0, starting from the smallest dims."""
    p = len(orbit)
    start = min(orbit, key=lambda s: s.dims)
    chain = [start]
    while len(chain) < p:
        nxt = [s for s in orbit if s is not chain[-1] and ext1_dim(chain[-1], s) != 0]
        if len(nxt) != 1 or any(s is nxt[0] for s in chain):
            raise InternalError(f"tube simples around dims {start.dims} do not form an Ext-cycle")
        chain.append(nxt[0])
    # chain = R_0, R_{p-1}, R_{p-2}, ...
    return [chain[0]] + chain[1:][::-1]


def find_tubes(q: Quiver, f: Field, seed: int = 0) -> List[Tube]:
    """All inhomogeneous tubes, each with its simples and extension maps."""
    admissible_sink_sequence(q)
    delta = minimal_imaginary_root(q)
    rng = random.Random(seed)
    candidates = [a for a in positive_real_roots_below(q, delta) if a != delta and defect(q, a) == 0]
    modules = {a: _sample_indecomposable(q, f, a, rng) for a in candidates}
    simples = []
    for a in candidates:
        smaller = [b for b in candidates if b != a and is_below(b, a)]
        if all(hom_dim(modules[b], modules[a]) == 0 for b in smaller):
            simples.append(a)
    remaining = set(simples)
    tubes = []
    for a in simples:
        if a not in remaining:
            continue
        orbit_dims = [a]
        nxt = coxeter_vector(q, a)
        while nxt != a:
            if nxt not in remaining:
                raise InternalError(f"Coxeter image {nxt} of a regular simple is not a regular simple")
            orbit_dims.append(nxt)
            nxt = coxeter_vector(q, nxt)
        remaining.difference_update(orbit_dims)
        if len(orbit_dims) < 2:
            raise InternalError(f"regular simple {a} below delta is Coxeter-fixed")
        ordered = _order_orbit([modules[b] for b in orbit_dims])
        tubes.append(Tube(q, f, len(ordered), tuple(ordered)))
    tubes.sort(key=lambda t: t.simples[0].dims)
    tubes = [extension_maps(t) for t in tubes]
    logger.info("found %d inhomogeneous tubes with periods %s", len(tubes), [t.period for t in tubes])
    return tubes


def extension_maps(t: Tube) -> Tube:
    """Fill l_{z,w} from the first echelon class of Ext^1(R_z, R_{z-1})."""
    rows = []
    for z in range(t.period):
        src, dst = t.simple(z), t.simple(z - 1)
        classes = ext_classes(src, dst)
        if len(classes) != 1:
            raise InternalError(f"Ext^1(R_{z}, R_{z - 1}) has dimension {len(classes)}, expected 1")
        cocycle = classes[0]
        if all(block.is_zero() for block in cocycle):
            raise InternalError("chosen extension class is split")
        rows.append(cocycle)
    return Tube(t.quiver, t.field, t.period, t.simples, tuple(rows))


# The Hall functor

def _check_tube_input(t: Tube, m: CyclicRep):
    if m.p != t.period:
        raise UsageError(f"cyclic representation has period {m.p}, tube has period {t.period}")
    if m.field != t.field:
        raise UsageError("cyclic representation and tube live over different fields")
    if t.ext_maps is None:
        raise UsageError("tube has no extension maps; call extension_maps first")


def hall_apply(t: Tube, m: CyclicRep) -> Representation:
    """F(V)_i = sum_z V_z (x) R_{z,i}, arrow maps I (x) r_{z,w} + theta_z (x) l_{z,w}."""
    _check_tube_input(t, m)
    q, f, p = t.quiver, t.field, t.period
    dims = tuple(sum(m.dims[z] * t.simple(z).dims[k] for z in range(p)) for k in range(q.n))
    maps = []
    for w, arrow in enumerate(q.arrows):
        ti, hi = q.index(arrow.tail), q.index(arrow.head)
        row_sizes = [m.dims[z] * t.simple(z).dims[hi] for z in range(p)]
        col_sizes = [m.dims[z] * t.simple(z).dims[ti] for z in range(p)]
        grid: List[List[Optional[Matrix]]] = [[None] * p for _ in range(p)]
        for z in range(p):
            grid[z][z] = kron(identity(f, m.dims[z]), t.simple(z).maps[w])
            below = (z - 1) % p
            grid[below][z] = kron(m.maps[z], t.ext_maps[z][w])
        maps.append(block_matrix(f, grid, row_sizes, col_sizes))
    return Representation(q, f, dims, tuple(maps))


def hall_apply_morphism(t: Tube, source: CyclicRep, target: CyclicRep, phi: Sequence[Matrix]) -> Tuple[Matrix, ...]:
    """F on a morphism (phi_z): block diagonal phi_z (x) Id on each vertex."""
    _check_tube_input(t, source)
    _check_tube_input(t, target)
    q, f, p = t.quiver, t.field, t.period
    blocks = []
    for k in range(q.n):
        grid: List[List[Optional[Matrix]]] = [[None] * p for _ in range(p)]
        for z in range(p):
            grid[z][z] = kron(phi[z], identity(f, t.simple(z).dims[k]))
        row_sizes = [target.dims[z] * t.simple(z).dims[k] for z in range(p)]
        col_sizes = [source.dims[z] * t.simple(z).dims[k] for z in range(p)]
        blocks.append(block_matrix(f, grid, row_sizes, col_sizes))
    return tuple(blocks)


def tube_module(t: Tube, z: int, length: int) -> Representation:
    return hall_apply(t, cyclic_indec(t.period, z, length, t.field))


def in_tube(t: Tube, n: Representation) -> bool:
    """An indecomposable lies in t iff it is regular with a regular simple of t in its socle."""
    if defect(t.quiver, n.dims) != 0:
        return False
    return any(hom_dim(t.simple(z), n) != 0 for z in range(t.period))


def is_aperiodic_tube(t: Tube, m: Representation, seed: int = 0) -> bool:
    """No summand N has all of N, Phi^+ N, ..., (Phi^+)^{p-1} N among the summands."""
    summands = [piece for piece, _ in indecompose(m, seed)] if m.total_dim else []
    for piece in summands:
        if not in_tube(t, piece):
            raise UsageError(f"summand of dims {piece.dims} does not lie in the tube")

    def present(n: Representation) -> bool:
        return any(s.dims == n.dims and is_isomorphic(s, n, seed) for s in summands)

    for piece in summands:
        orbit = [piece]
        for _ in range(t.period - 1):
            orbit.append(coxeter_plus(t.quiver, orbit[-1]))
        if all(present(n) for n in orbit[1:]):
            return False
    return True


def hom_transport_check(t: Tube, m1: CyclicRep, m2: CyclicRep) -> bool:
    """dim Hom_{C_p}(m1, m2) equals dim Hom_Q(F m1, F m2)."""
    for m in (m1, m2):
        if not is_nilpotent(m.to_representation()):
            raise UsageError("hom transport is checked on nilpotent representations only")
    cyclic = hom_dim(m1.to_representation(), m2.to_representation())
    transported = hom_dim(hall_apply(t, m1), hall_apply(t, m2))
    return cyclic == transported


def certify_homogeneous_simple(q: Quiver, m: Representation, seed: int = 0) -> bool:
    """dims delta, End = K and Phi^+ m isomorphic to m."""
    if m.dims != minimal_imaginary_root(q) or end_dim(m) != 1:
        return False
    image = coxeter_plus(q, m)
    return image.dims == m.dims and is_isomorphic(image, m, seed)


def homogeneous_simple(q: Quiver, f: Field, rng: random.Random,
                       avoid: Sequence[Representation] = ()) -> Representation:
    """A sampled homogeneous regular simple not isomorphic to anything in ``avoid``."""
    delta = minimal_imaginary_root(q)
    for attempt in range(SAMPLING_BUDGET):
        m = random_rep(q, f, delta, rng)
        if not certify_homogeneous_simple(q, m):
            continue
        if any(is_isomorphic(m, other) for other in avoid):
            continue
        logger.debug("homogeneous simple found after %d samples", attempt + 1)
        return m
    raise NeedsLargerField(f"could not find {len(avoid) + 1} distinct homogeneous simples over {f!r}")


def _tube_index(tubes: Sequence[Tube], n: Representation) -> Optional[int]:
    for k, t in enumerate(tubes):
        if in_tube(t, n):
            return k
    return None


def _vanishing_applies(q: Quiver, m: Representation, n: Representation,
                       tubes: Sequence[Tube], seed: int) -> bool:
    cm, cn = classify(q, m, seed), classify(q, n, seed)
    if cm.kind != PREINJECTIVE and cn.kind == PREINJECTIVE:
        return True
    if cm.kind == PREPROJECTIVE and cn.kind != PREPROJECTIVE:
        return True
    if cm.is_regular and cn.is_regular:
        tm, tn = _tube_index(tubes, m), _tube_index(tubes, n)
        if tm is None and tn is None:
            raise UsageError("cannot tell homogeneous tubes apart; pass modules from inhomogeneous tubes")
        return tm != tn
    if cm.kind == PREINJECTIVE and cn.kind == PREINJECTIVE:
        (km, rm), (kn, rn) = preinjective_position(q, m), preinjective_position(q, n)
        return km > kn or (km == kn and rm <= rn)
    if cm.kind == PREPROJECTIVE and cn.kind == PREPROJECTIVE:
        (km, rm), (kn, rn) = preprojective_position(q, m), preprojective_position(q, n)
        return km < kn or (km == kn and rm <= rn)
    return False


def vanishing_lemma_holds(q: Quiver, m: Representation, n: Representation,
                          tubes: Sequence[Tube] = (), seed: int = 0) -> bool:
    """Ext^1(m, n) = 0 and, unless m ~ n, Hom(n, m) = 0 for a covered pair of indecomposables."""
    if not _vanishing_applies(q, m, n, tubes, seed):
        raise UsageError(f"pair of dims {m.dims}, {n.dims} is not in a configuration the vanishing lemma covers")
    if ext1_dim(m, n) != 0:
        return False
    if m.dims == n.dims and is_isomorphic(m, n, seed):
        return True
    return hom_dim(n, m) == 0


def parse_segments(text: str) -> List[Tuple[int, int]]:
    """Read "0:2,1:1" as [(0, 2), (1, 1)] (socle:length)."""
    segments = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        z, _, length = part.partition(":")
        segments.append((int(z), int(length) if length else 1))
    return segments


def register_tools(mcp):
    """Register the tube analysis tool with the MCP server."""

    @mcp.tool()
    async def tube_analysis(
        operation: str,
        quiver: str = "",
        field: int = 17,
        seed: int = 0,
        tube: int = 0,
        period: int = 2,
        segments: str = "",
        other_segments: str = "",
        lam: int = 1,
    ) -> str:
        """
        Tubes of an affine quiver, cyclic-quiver representations and the Hall functor.

        Args:
            operation: "find_tubes", "cyclic_simple", "cyclic_t_lambda", "cyclic_indec",
                "hall_apply", "is_aperiodic_cyclic", "is_aperiodic_tube" or "hom_transport_check"
            quiver: quiver JSON (acyclic affine) for tube operations
            field: prime for all constructions
            seed: seed for sampling
            tube: tube index as listed by find_tubes
            period: period p for pure cyclic operations
            segments: cyclic representation as socle:length list, e.g. "0:2,1:1"
            other_segments: second cyclic representation for hom_transport_check
            lam: scalar for cyclic_t_lambda

        Returns:
            String with the result
        """
        def _cyclic(p, text):
            parts = [cyclic_indec(p, z, length, f) for z, length in parse_segments(text)]
            if not parts:
                raise UsageError("segments must name at least one s_{z,l}")
            return cyclic_direct_sum(*parts) if len(parts) > 1 else parts[0]

        def _tube():
            tubes = find_tubes(Quiver.from_json(quiver), f, seed)
            if not 0 <= tube < len(tubes):
                raise UsageError(f"tube index {tube} outside 0..{len(tubes) - 1}")
            return tubes[tube]

        def _find(_):
            tubes = find_tubes(Quiver.from_json(quiver), f, seed)
            lines = [f"✅ {len(tubes)} tubes, periods {[t.period for t in tubes]}"]
            for k, t in enumerate(tubes):
                lines.append(f"tube {k}: simples {[s.dims for s in t.simples]}")
            return "\n".join(lines)

        def _apply(_):
            t = _tube()
            image = hall_apply(t, _cyclic(t.period, segments))
            return f"✅ dims {image.dims}: {json.dumps(image.to_json())}"

        def _aperiodic_tube(_):
            t = _tube()
            return f"✅ aperiodic: {is_aperiodic_tube(t, hall_apply(t, _cyclic(t.period, segments)), seed)}"

        def _transport(_):
            t = _tube()
            ok = hom_transport_check(t, _cyclic(t.period, segments), _cyclic(t.period, other_segments))
            return f"✅ Hom dimensions agree: {ok}"

        valid_operations = {
            "find_tubes": _find,
            "cyclic_simple": lambda _: f"✅ dims {cyclic_simple(period, int(segments or 0), f).dims}",
            "cyclic_t_lambda": lambda _: f"✅ dims {cyclic_t_lambda(period, lam, f).dims}",
            "cyclic_indec": lambda _: f"✅ dims {_cyclic(period, segments).dims}",
            "hall_apply": _apply,
            "is_aperiodic_cyclic": lambda _: f"✅ aperiodic: {is_aperiodic_cyclic(_cyclic(period, segments))}",
            "is_aperiodic_tube": _aperiodic_tube,
            "hom_transport_check": _transport,
        }
        if operation not in valid_operations:
            return f"❌ Invalid operation '{operation}'. Valid operations: {', '.join(valid_operations)}"
        try:
            f = Field(field)
            return valid_operations[operation](None)
        except Exception as e:
            code = getattr(e, "code", "error")
            return f"❌ Error in {operation} [{code}]: {str(e)}"
