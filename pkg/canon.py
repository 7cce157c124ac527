"""
Canonical Basis Module for the Affine Quiver toolkit

The combinatorial parametrization of canonical basis elements of weight nu by pairs
(sigma, lambda): sigma an aperiodic multiplicity function on the non-homogeneous
indecomposables, lambda a partition counting copies of delta.

- build_inventory: every preprojective, preinjective and inhomogeneous tube module below a bound
- enumerate_delta and the independent weight_dim_oracle it is checked against
- count_aperiodic_cyclic for the cyclic quiver C_p
- stratum_dim, generic_rep_of_stratum and locate_stratum

Inventories are expensive, so they are cached on disk as versioned JSON.
"""

import hashlib
import itertools
import json
import logging
import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import partitions

try:
    from .errors import InventoryIncomplete, NeedsLargerField, UsageError
    from .exactfield import Field
    from .functors import (
        PREINJECTIVE, PREPROJECTIVE, REGULAR_INHOMOGENEOUS, coxeter_minus, coxeter_plus,
        injective_rep, projective_rep,
    )
    from .quiver import (
        DimVector, Quiver, admissible_sink_sequence, classify_graph, coxeter_vector, defect,
        euler_form, is_below, minimal_imaginary_root, parse_dim_vector, positive_real_roots_below,
    )
    from .rep import Representation, direct_sum, hom_dim, indecompose, is_isomorphic, power, zero_rep
    from .tubes import Tube, find_tubes, homogeneous_simple, in_tube, tube_module
except ImportError:
    from errors import InventoryIncomplete, NeedsLargerField, UsageError
    from exactfield import Field
    from functors import (
        PREINJECTIVE, PREPROJECTIVE, REGULAR_INHOMOGENEOUS, coxeter_minus, coxeter_plus,
        injective_rep, projective_rep,
    )
    from quiver import (
        DimVector, Quiver, admissible_sink_sequence, classify_graph, coxeter_vector, defect,
        euler_form, is_below, minimal_imaginary_root, parse_dim_vector, positive_real_roots_below,
    )
    from rep import Representation, direct_sum, hom_dim, indecompose, is_isomorphic, power, zero_rep
    from tubes import Tube, find_tubes, homogeneous_simple, in_tube, tube_module


logger = logging.getLogger(__name__)

CACHE_VERSION = 1
MAX_COXETER_ORDER = 1000


@dataclass(frozen=True)
class InventoryItem:
    label: str
    dims: DimVector
    kind: str
    rep: Representation
    period: Optional[int] = None

    def to_json(self) -> dict:
        return {"label": self.label, "dims": list(self.dims), "kind": self.kind,
                "period": self.period, "rep": self.rep.to_json()}


@dataclass(frozen=True)
class Inventory:
    quiver: Quiver
    field: Field
    bound: DimVector
    items: Tuple[InventoryItem, ...]
    tubes: Tuple[Tube, ...]

    def by_label(self) -> Dict[str, InventoryItem]:
        return {item.label: item for item in self.items}

    def labels(self) -> List[str]:
        return [item.label for item in self.items]

    def periodic_groups(self) -> List[Tuple[str, ...]]:
        """Labels of each full Phi^+-orbit of tube modules of one length."""
        groups: Dict[Tuple[str, str], List[str]] = {}
        for item in self.items:
            if item.kind != REGULAR_INHOMOGENEOUS:
                continue
            tube, _, length = item.label[1:].split(".")
            groups.setdefault((tube, length), []).append(item.label)
        periods = {str(k): t.period for k, t in enumerate(self.tubes)}
        return [tuple(labels) for (tube, _), labels in groups.items() if len(labels) == periods[tube]]


@dataclass(frozen=True)
class CanonicalParam:
    """(sigma, lambda); lambda is weakly decreasing and empty for the partition (0)."""

    sigma: Tuple[Tuple[str, int], ...]
    lam: Tuple[int, ...] = ()

    @property
    def q(self) -> int:
        return sum(self.lam)

    def sigma_dict(self) -> Dict[str, int]:
        return dict(self.sigma)

    def lambda_text(self) -> str:
        return "(0)" if not self.lam else "(" + ",".join(str(x) for x in self.lam) + ")"

    def to_json(self) -> dict:
        return {"sigma": self.sigma_dict(), "lambda": list(self.lam)}

    def __str__(self):
        sigma = ", ".join(f"{label}:{k}" for label, k in self.sigma) or "0"
        return f"sigma={{{sigma}}} lambda={self.lambda_text()}"


@dataclass(frozen=True)
class StratumPoint:
    """Where a sampled representation sits: (sigma, q), or on the boundary of every stratum."""

    sigma: Tuple[Tuple[str, int], ...]
    q: int
    boundary: bool = False

    def __str__(self):
        if self.boundary:
            return "boundary"
        sigma = ", ".join(f"{label}:{k}" for label, k in self.sigma) or "0"
        return f"sigma={{{sigma}}} q={self.q}"


# Inventory construction

def coxeter_order_mod_delta(q: Quiver) -> int:
    """Least L >= 1 with c^L(x) - x a multiple of delta for every x."""
    delta = minimal_imaginary_root(q)
    units = [q.unit_vector(v) for v in q.vertices]
    images = list(units)
    for order in range(1, MAX_COXETER_ORDER + 1):
        images = [coxeter_vector(q, x) for x in images]
        if all(_is_multiple(tuple(a - b for a, b in zip(img, e)), delta) for img, e in zip(images, units)):
            return order
    raise InventoryIncomplete("Coxeter transformation has no finite order modulo delta")


def _is_multiple(d: Sequence[int], delta: Sequence[int]) -> bool:
    return all(d[j] * delta[k] == d[k] * delta[j] for j in range(len(d)) for k in range(len(d)))


def _chain_steps(q: Quiver, start: DimVector, bound: DimVector, inverse: bool, window: int) -> List[int]:
    """Coxeter powers k whose image of ``start`` stays below the bound."""
    steps, k, misses, dims = [], 0, 0, start
    while misses < window:
        if is_below(dims, bound):
            steps.append(k)
            misses = 0
        else:
            misses += 1
        dims = coxeter_vector(q, dims, inverse=inverse)
        k += 1
    return steps


def _chain(q: Quiver, first: Representation, steps: List[int], inverse: bool, prefix: str,
           kind: str) -> List[InventoryItem]:
    items, current, wanted = [], first, set(steps)
    step = coxeter_minus if inverse else coxeter_plus
    for k in range(max(steps) + 1 if steps else 0):
        if k:
            current = step(q, current)
        if k in wanted:
            items.append(InventoryItem(f"{prefix}.{k}", current.dims, kind, current))
    return items


def _build_items(q: Quiver, f: Field, bound: DimVector, seed: int) -> Tuple[List[InventoryItem], List[Tube]]:
    seq = admissible_sink_sequence(q)
    window = coxeter_order_mod_delta(q)
    items: List[InventoryItem] = []
    for r in range(1, len(seq) + 1):
        p = projective_rep(q, r, f)
        steps = _chain_steps(q, p.dims, bound, inverse=True, window=window)
        items += _chain(q, p, steps, True, f"P{r}", PREPROJECTIVE)
    tubes = find_tubes(q, f, seed) if any(bound) else []
    for t_index, tube in enumerate(tubes):
        for z in range(tube.period):
            length = 1
            while is_below(tube.dims_of(z, length), bound):
                rep = tube_module(tube, z, length)
                items.append(InventoryItem(f"T{t_index}.{z}.{length}", rep.dims, REGULAR_INHOMOGENEOUS, rep,
                                           period=tube.period))
                length += 1
    for r in range(1, len(seq) + 1):
        i = injective_rep(q, r, f)
        steps = _chain_steps(q, i.dims, bound, inverse=False, window=window)
        items += _chain(q, i, steps, False, f"I{r}", PREINJECTIVE)
    return items, tubes


def _certify(q: Quiver, bound: DimVector, items: List[InventoryItem]):
    """Every real root below the bound must occur exactly once."""
    counts: Dict[DimVector, int] = {}
    for item in items:
        counts[item.dims] = counts.get(item.dims, 0) + 1
    for root in positive_real_roots_below(q, bound):
        if counts.get(root, 0) != 1:
            raise InventoryIncomplete(f"real root {root} occurs {counts.get(root, 0)} times in the inventory")
    for item in items:
        if item.kind != REGULAR_INHOMOGENEOUS and counts[item.dims] != 1:
            raise InventoryIncomplete(f"dims {item.dims} repeated among non-regular items")


def _graph_hash(q: Quiver) -> str:
    edges = sorted(tuple(sorted((a.tail, a.head))) for a in q.arrows)
    return hashlib.sha256(json.dumps([list(q.vertices), edges]).encode()).hexdigest()


def inventory_cache_key(q: Quiver, f: Field, bound: DimVector, seed: int) -> str:
    orientation = hashlib.sha256(q.content_hash_source().encode()).hexdigest()
    raw = json.dumps([_graph_hash(q), orientation, list(bound), f.to_json(), seed, CACHE_VERSION])
    return hashlib.sha256(raw.encode()).hexdigest()


def _load_cached(path: Path, q: Quiver, f: Field, bound: DimVector) -> Optional[Inventory]:
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        if data.get("version") != CACHE_VERSION:
            logger.warning("inventory cache %s has version %s, rebuilding", path, data.get("version"))
            return None
        tubes = tuple(Tube.from_json(t, q, f) for t in data["tubes"])
        items = tuple(
            InventoryItem(raw["label"], tuple(raw["dims"]), raw["kind"],
                          Representation.from_json(raw["rep"], quiver=q, field=f), raw.get("period"))
            for raw in data["items"]
        )
    except Exception as e:
        logger.warning("inventory cache %s is unreadable (%s), rebuilding", path, e)
        return None
    logger.info("inventory cache hit %s", path.name)
    return Inventory(q, f, bound, items, tubes)


def _store_cached(path: Path, inventory: Inventory):
    path.parent.mkdir(parents=True, exist_ok=True)
    lock = path.with_suffix(".lock")
    try:
        fd = os.open(str(lock), os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        logger.warning("inventory cache %s is locked by another writer, not storing", path.name)
        return
    try:
        os.close(fd)
        payload = {
            "version": CACHE_VERSION,
            "bound": list(inventory.bound),
            "items": [item.to_json() for item in inventory.items],
            "tubes": [t.to_json() for t in inventory.tubes],
        }
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload))
        os.replace(tmp, path)
    finally:
        lock.unlink()


def build_inventory(q: Quiver, f: Field, bound: Sequence[int], seed: int = 0,
                    cache_dir: Optional[Path] = None) -> Inventory:
    """All non-homogeneous indecomposables of dims <= bound, labelled P{r}.{k}, I{r}.{k}, T{t}.{z}.{l}."""
    bound = q.check_vector(bound)
    classify_graph(q)
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"{inventory_cache_key(q, f, bound, seed)}.json"
        cached = _load_cached(path, q, f, bound)
        if cached is not None:
            return cached
    items, tubes = _build_items(q, f, bound, seed)
    _certify(q, bound, items)
    inventory = Inventory(q, f, bound, tuple(items), tuple(tubes))
    logger.info("built inventory of %d items below %s", len(items), bound)
    if path is not None:
        _store_cached(path, inventory)
    return inventory


# Enumeration

def _multisets(parts: Sequence[Tuple[object, DimVector]], target: DimVector) -> List[Tuple[Tuple[object, int], ...]]:
    """Every multiset of parts (as sorted (key, multiplicity) pairs) summing to target."""
    parts = [(key, vec) for key, vec in parts if any(vec) and is_below(vec, target)]
    found = []

    def walk(index, remaining, chosen):
        if not any(remaining):
            found.append(tuple(sorted(chosen)))
            return
        if index == len(parts):
            return
        key, vec = parts[index]
        most = min(r // v for r, v in zip(remaining, vec) if v)
        for k in range(most, -1, -1):
            rest = tuple(r - k * v for r, v in zip(remaining, vec))
            if k:
                chosen.append((key, k))
            walk(index + 1, rest, chosen)
            if k:
                chosen.pop()

    walk(0, tuple(target), [])
    return found


def _is_aperiodic(sigma: Iterable[Tuple[str, int]], groups: List[Tuple[str, ...]]) -> bool:
    support = {label for label, k in sigma if k}
    return not any(all(label in support for label in group) for group in groups)


def _partitions_of(n: int) -> List[Tuple[int, ...]]:
    if n == 0:
        return [()]
    found = []
    for parts in partitions(n):
        found.append(tuple(sorted((k for k, mult in parts.items() for _ in range(mult)), reverse=True)))
    return sorted(found)


def enumerate_delta(q: Quiver, nu: Sequence[int], inventory: Inventory) -> List[CanonicalParam]:
    """Delta_nu in order: q ascending, lambda lexicographic, sigma lexicographic by label."""
    nu = q.check_vector(nu)
    if inventory.quiver != q:
        raise UsageError("inventory was built for a different quiver")
    if not is_below(nu, inventory.bound):
        raise UsageError(f"inventory bound {inventory.bound} does not cover {nu}")
    delta = minimal_imaginary_root(q)
    parts = [(item.label, item.dims) for item in inventory.items]
    groups = inventory.periodic_groups()
    params = []
    weight = 0
    while True:
        target = tuple(a - weight * d for a, d in zip(nu, delta))
        if any(x < 0 for x in target):
            break
        sigmas = sorted(s for s in _multisets(parts, target) if _is_aperiodic(s, groups))
        for lam in _partitions_of(weight):
            params.extend(CanonicalParam(s, lam) for s in sigmas)
        weight += 1
    logger.debug("|Delta_%s| = %d", nu, len(params))
    return params


def weight_dim_oracle(q: Quiver, nu: Sequence[int]) -> int:
    """Coefficient of x^nu in prod_real (1 - x^a)^-1 * prod_n (1 - x^{n delta})^-(|I| - 1)."""
    nu = q.check_vector(nu)
    classify_graph(q)
    delta = minimal_imaginary_root(q)
    box = list(itertools.product(*(range(x + 1) for x in nu)))
    coeff = {v: 0 for v in box}
    coeff[tuple(0 for _ in nu)] = 1

    def divide_by(root):
        for v in box:
            prev = tuple(a - b for a, b in zip(v, root))
            if all(x >= 0 for x in prev):
                coeff[v] += coeff[prev]

    for root in positive_real_roots_below(q, nu):
        divide_by(root)
    n = 1
    while is_below(tuple(n * d for d in delta), nu):
        for _ in range(q.n - 1):
            divide_by(tuple(n * d for d in delta))
        n += 1
    return coeff[nu]


def count_aperiodic_cyclic(p: int, nu: Sequence[int]) -> int:
    """Aperiodic multisets of s_{z,l} of total graded dimension nu."""
    if p < 2 or len(nu) != p:
        raise UsageError(f"need {p} graded dimensions for C_{p}")
    nu = tuple(int(x) for x in nu)
    segments = []
    for length in range(1, sum(nu) + 1):
        for z in range(p):
            dims = [0] * p
            for j in range(length):
                dims[(z + j) % p] += 1
            if is_below(dims, nu):
                segments.append(((z, length), tuple(dims)))
    count = 0
    for multiset in _multisets(segments, nu):
        socles: Dict[int, set] = {}
        for (z, length), _ in multiset:
            socles.setdefault(length, set()).add(z)
        if all(len(zs) < p for zs in socles.values()):
            count += 1
    return count


# Strata

def _sigma_rep(param: CanonicalParam, inventory: Inventory) -> Tuple[List[Tuple[InventoryItem, int]], DimVector]:
    table = inventory.by_label()
    chosen = []
    total = [0] * inventory.quiver.n
    for label, k in param.sigma:
        if label not in table:
            raise UsageError(f"unknown inventory label {label!r}")
        if k <= 0:
            raise UsageError(f"multiplicity of {label} must be positive")
        item = table[label]
        chosen.append((item, k))
        total = [a + k * b for a, b in zip(total, item.dims)]
    return chosen, tuple(total)


def stratum_dim(q: Quiver, param: CanonicalParam, inventory: Inventory) -> int:
    """dim X(sigma, lambda) = dim G_V - dim End(generic point) + q."""
    chosen, sigma_dims = _sigma_rep(param, inventory)
    delta = minimal_imaginary_root(q)
    weight = param.q
    nu = tuple(a + weight * d for a, d in zip(sigma_dims, delta))
    group_dim = sum(x * x for x in nu)
    end = 0
    for (a, ka), (b, kb) in itertools.product(chosen, chosen):
        end += ka * kb * hom_dim(a.rep, b.rep)
    # each homogeneous simple R adds End R = K, Hom(P, R) and Hom(R, I)
    pre_projective = [0] * q.n
    pre_injective = [0] * q.n
    for item, k in chosen:
        if item.kind == PREPROJECTIVE:
            pre_projective = [x + k * y for x, y in zip(pre_projective, item.dims)]
        elif item.kind == PREINJECTIVE:
            pre_injective = [x + k * y for x, y in zip(pre_injective, item.dims)]
    end += weight * (1 + euler_form(q, pre_projective, delta) + euler_form(q, delta, pre_injective))
    return group_dim - end + weight


def generic_rep_of_stratum(q: Quiver, param: CanonicalParam, inventory: Inventory, f: Field,
                           seed: int = 0) -> Representation:
    """sum of M^sigma(M) plus q pairwise nonisomorphic homogeneous simples."""
    if f != inventory.field:
        raise UsageError("inventory was built over a different field")
    chosen, _ = _sigma_rep(param, inventory)
    if f.is_prime and param.q > f.p + 1 - len(inventory.tubes):
        raise NeedsLargerField(f"{f!r} has too few homogeneous tubes for {param.q} distinct simples")
    rng = random.Random(seed)
    homogeneous: List[Representation] = []
    for _ in range(param.q):
        homogeneous.append(homogeneous_simple(q, f, rng, avoid=homogeneous))
    summands = [power(item.rep, k) for item, k in chosen] + homogeneous
    if not summands:
        return zero_rep(q, f)
    return direct_sum(*summands)


def locate_stratum(q: Quiver, m: Representation, inventory: Inventory, seed: int = 0) -> StratumPoint:
    """Read (sigma, q) off the decomposition of m; repeated or non-simple homogeneous parts are boundary."""
    if m.total_dim == 0:
        return StratumPoint((), 0)
    if not is_below(m.dims, inventory.bound):
        raise UsageError(f"inventory bound {inventory.bound} does not cover {m.dims}")
    delta = minimal_imaginary_root(q)
    sigma: Dict[str, int] = {}
    weight = 0
    boundary = False
    for piece, mult in indecompose(m, seed):
        d = defect(q, piece.dims)
        if d == 0 and not any(in_tube(t, piece) for t in inventory.tubes):
            if piece.dims != delta or mult > 1:
                boundary = True
            weight += mult * (sum(piece.dims) // sum(delta))
            continue
        label = _match_item(piece, inventory, seed)
        sigma[label] = sigma.get(label, 0) + mult
    return StratumPoint(tuple(sorted(sigma.items())), weight, boundary)


def _match_item(piece: Representation, inventory: Inventory, seed: int) -> str:
    for item in inventory.items:
        if item.dims == piece.dims and is_isomorphic(item.rep, piece, seed):
            return item.label
    raise UsageError(f"no inventory item matches a summand of dims {piece.dims}")


def register_tools(mcp):
    """Register the canonical basis tool with the MCP server."""

    @mcp.tool()
    async def canonical_basis(
        operation: str,
        quiver: str = "",
        nu: str = "",
        bound: str = "",
        field: int = 17,
        seed: int = 0,
        period: int = 2,
        sigma: str = "",
        lam: str = "",
        rep: str = "",
    ) -> str:
        """
        Canonical basis parametrization Delta_nu and its checks.

        Args:
            operation: "build_inventory", "enumerate_delta", "weight_dim_oracle",
                "count_aperiodic_cyclic", "stratum_dim", "generic_rep_of_stratum" or "locate_stratum"
            quiver: quiver JSON (acyclic affine except for weight_dim_oracle)
            nu: dimension vector as a comma list in vertex order (graded dims for the cyclic count)
            bound: inventory bound (defaults to nu)
            field: prime for the inventory
            seed: seed for sampling
            period: p for count_aperiodic_cyclic
            sigma: JSON object {label: multiplicity} for stratum operations
            lam: partition as a comma list, empty for (0)
            rep: Representation JSON for locate_stratum

        Returns:
            String with the result
        """
        def _q():
            return Quiver.from_json(quiver)

        def _vec(q, text):
            return parse_dim_vector(q, text)

        def _inventory(q):
            return build_inventory(q, Field(field), _vec(q, bound or nu), seed)

        def _param():
            raw = json.loads(sigma) if sigma else {}
            parts = tuple(sorted(int(x) for x in lam.split(",") if x.strip()))[::-1]
            return CanonicalParam(tuple(sorted((str(k), int(v)) for k, v in raw.items())), parts)

        def _inventory_report(_):
            inv = _inventory(_q())
            return f"✅ {len(inv.items)} items: " + ", ".join(f"{i.label}{i.dims}" for i in inv.items)

        def _delta_report(_):
            q = _q()
            params = enumerate_delta(q, _vec(q, nu), _inventory(q))
            return f"✅ |Delta| = {len(params)}\n" + "\n".join(str(p) for p in params)

        def _oracle(_):
            q = _q()
            return f"✅ dim U^-_nu = {weight_dim_oracle(q, _vec(q, nu))}"

        def _cyclic(_):
            dims = [int(x) for x in nu.split(",")]
            return f"✅ aperiodic count = {count_aperiodic_cyclic(period, dims)}"

        def _stratum(_):
            q = _q()
            return f"✅ stratum dimension = {stratum_dim(q, _param(), _inventory(q))}"

        def _generic(_):
            q = _q()
            m = generic_rep_of_stratum(q, _param(), _inventory(q), Field(field), seed)
            return f"✅ dims {m.dims}: {json.dumps(m.to_json())}"

        def _locate(_):
            q = _q()
            if not rep:
                raise UsageError("operation 'locate_stratum' requires parameter: rep")
            m = Representation.from_json(rep, quiver=q, field=Field(field))
            point = locate_stratum(q, m, _inventory(q), seed)
            return f"✅ {point}"

        valid_operations = {
            "build_inventory": _inventory_report,
            "enumerate_delta": _delta_report,
            "weight_dim_oracle": _oracle,
            "count_aperiodic_cyclic": _cyclic,
            "stratum_dim": _stratum,
            "generic_rep_of_stratum": _generic,
            "locate_stratum": _locate,
        }
        if operation not in valid_operations:
            return f"❌ Invalid operation '{operation}'. Valid operations: {', '.join(valid_operations)}"
        try:
            return valid_operations[operation](None)
        except Exception as e:
            code = getattr(e, "code", "error")
            return f"❌ Error in {operation} [{code}]: {str(e)}"
