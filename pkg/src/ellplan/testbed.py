"""Desk-scale instances for the ratio targets: weighted coverage + matroids.

Coverage functions keep every value an exact rational and are monotone
submodular by construction, which makes them the right family for grounding
the certified ratio targets: brute force is exact, greedy is exact, and the
property checker never faces float noise.

The depth-ell local-search algorithm whose guarantee rho(ell) * f(OPT)
describes is deliberately not implemented (its potential function and nested
outputs are not specified to an implementable level); this module reports
the certified targets and classical baselines around that hole.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import lcm
from pathlib import Path
from typing import AbstractSet, Callable, Iterable, Optional, Union

from ellplan.bounds import rho
from ellplan.certified import (
    DEFAULT_POLICY,
    Enclosure,
    PrecisionExhausted,
    RefinementPolicy,
    Verdict,
    cmp_certified,
    const,
    enclose_e,
    inv_e,
)
from ellplan.planner import EpsSpec, RationalLike, ell_star

BRUTE_FORCE_LIMIT = 20  # 2^n enumeration
CHECK_LIMIT = 12  # 3^n subset pairs
SUBSET_COST_LIMIT = 30

LOCAL_SEARCH_NOTE = "depth-ell local search not implemented; targets and baselines only"


class InstanceFormatError(ValueError):
    """Instance text that fails parsing or validation, with a field path."""


@dataclass
class OracleCounter:
    """Counts value-oracle calls; one tick per evaluation, no implicit resets."""

    count: int = 0

    def tick(self) -> None:
        self.count += 1

    def add(self, other: "OracleCounter") -> None:
        self.count += other.count


@dataclass(frozen=True)
class UniformMatroid:
    rank: int

    def __post_init__(self):
        if not isinstance(self.rank, int) or isinstance(self.rank, bool) or self.rank < 0:
            raise ValueError(f"rank must be a nonnegative integer, got {self.rank!r}")

    def is_independent(self, names: AbstractSet[str]) -> bool:
        return len(names) <= self.rank


@dataclass(frozen=True)
class PartitionBlock:
    members: frozenset[str]
    capacity: int

    def __post_init__(self):
        if not self.members:
            raise ValueError("partition block must be non-empty")
        if (
            not isinstance(self.capacity, int)
            or isinstance(self.capacity, bool)
            or self.capacity < 0
        ):
            raise ValueError(f"capacity must be a nonnegative integer, got {self.capacity!r}")


@dataclass(frozen=True)
class PartitionMatroid:
    blocks: tuple[PartitionBlock, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for i, block in enumerate(self.blocks):
            overlap = seen & block.members
            if overlap:
                raise ValueError(f"blocks overlap on {sorted(overlap)}")
            seen |= block.members

    @cached_property
    def _block_of(self) -> dict[str, int]:
        return {
            name: i for i, block in enumerate(self.blocks) for name in block.members
        }

    def is_independent(self, names: AbstractSet[str]) -> bool:
        counts = [0] * len(self.blocks)
        for name in names:
            idx = self._block_of.get(name)
            if idx is None:
                raise ValueError(f"element {name!r} not covered by any block")
            counts[idx] += 1
            if counts[idx] > self.blocks[idx].capacity:
                return False
        return True

    @property
    def covered_names(self) -> frozenset[str]:
        return frozenset(self._block_of)


Matroid = Union[UniformMatroid, PartitionMatroid]


@dataclass(frozen=True)
class CoverageInstance:
    """Weighted coverage with a matroid constraint; order follows the source.

    universe maps items to positive rational weights; each ground element
    covers a subset of items.  f(S) is the total weight covered by the union
    over S.
    """

    universe: tuple[tuple[str, Fraction], ...]
    ground: tuple[tuple[str, frozenset[str]], ...]
    matroid: Matroid

    def __post_init__(self):
        item_names = [name for name, _ in self.universe]
        if len(set(item_names)) != len(item_names):
            raise ValueError("duplicate universe item names")
        for name, weight in self.universe:
            if not isinstance(weight, Fraction) or weight <= 0:
                raise ValueError(f"universe.{name}: weight must be a positive rational")
        element_names = [name for name, _ in self.ground]
        if len(set(element_names)) != len(element_names):
            raise ValueError("duplicate ground element names")
        items = set(item_names)
        for name, members in self.ground:
            stray = members - items
            if stray:
                raise ValueError(f"ground.{name}: unknown items {sorted(stray)}")
        if isinstance(self.matroid, UniformMatroid):
            if self.matroid.rank > self.n:
                raise ValueError(
                    f"matroid.rank: {self.matroid.rank} exceeds ground size {self.n}"
                )
        else:
            covered = self.matroid.covered_names
            ground_set = set(element_names)
            missing = ground_set - covered
            stray = covered - ground_set
            if missing:
                raise ValueError(f"matroid.blocks: elements {sorted(missing)} uncovered")
            if stray:
                raise ValueError(f"matroid.blocks: unknown elements {sorted(stray)}")

    @property
    def n(self) -> int:
        return len(self.ground)

    @property
    def element_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ground)

    @property
    def rank(self) -> int:
        if isinstance(self.matroid, UniformMatroid):
            return min(self.matroid.rank, self.n)
        return sum(
            min(b.capacity, len(b.members)) for b in self.matroid.blocks
        )

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.universe), Fraction(0))


def f_eval(
    instance: CoverageInstance,
    subset: Iterable[str],
    counter: Optional[OracleCounter] = None,
) -> Fraction:
    """Coverage value of a set of ground elements; one oracle tick."""
    names = set(subset)
    known = set(instance.element_names)
    stray = names - known
    if stray:
        raise ValueError(f"not ground elements: {sorted(stray)}")
    if counter is not None:
        counter.tick()
    members = dict(instance.ground)
    covered: set[str] = set()
    for name in names:
        covered |= members[name]
    return sum((w for item, w in instance.universe if item in covered), Fraction(0))


# ---------------------------------------------------------------------------
# fast exact internals: weights scaled to integers, subsets as bitmasks


@dataclass(frozen=True)
class _Scaled:
    item_masks: tuple[int, ...]  # per ground element, mask over universe items
    cover_weight: tuple[int, ...]  # per universe-item mask, total scaled weight
    denominator: int

    def value(self, element_mask: int) -> int:
        cover = 0
        m = element_mask
        while m:
            low = (m & -m).bit_length() - 1
            cover |= self.item_masks[low]
            m &= m - 1
        return self.cover_weight[cover]


def _scaled(instance: CoverageInstance) -> _Scaled:
    weights = [w for _, w in instance.universe]
    denom = lcm(*(w.denominator for w in weights)) if weights else 1
    scaled = [int(w * denom) for w in weights]
    item_index = {name: i for i, (name, _) in enumerate(instance.universe)}
    item_masks = tuple(
        sum(1 << item_index[item] for item in members)
        for _, members in instance.ground
    )
    u = len(weights)
    cover_weight = [0] * (1 << u)
    for mask in range(1, 1 << u):
        low = (mask & -mask).bit_length() - 1
        cover_weight[mask] = cover_weight[mask & (mask - 1)] + scaled[low]
    return _Scaled(item_masks, tuple(cover_weight), denom)


def _block_masks(instance: CoverageInstance) -> Optional[list[tuple[int, int]]]:
    """(element mask, capacity) per block, or None for a uniform matroid."""
    if isinstance(instance.matroid, UniformMatroid):
        return None
    index = {name: i for i, name in enumerate(instance.element_names)}
    return [
        (sum(1 << index[name] for name in block.members), block.capacity)
        for block in instance.matroid.blocks
    ]


def _names_of(instance: CoverageInstance, mask: int) -> frozenset[str]:
    names = instance.element_names
    return frozenset(names[i] for i in range(len(names)) if mask >> i & 1)


# ---------------------------------------------------------------------------
# property checking


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of the exhaustive monotone/submodular scan.

    monotone_witness: (S, T) with S subset of T and f(S) > f(T).
    submodular_witness: (S, T, x) with S subset of T, x outside T, and the
    marginal of x at S strictly below the marginal at T.
    """

    monotone_witness: Optional[tuple] = None
    submodular_witness: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.monotone_witness is None and self.submodular_witness is None


def _scan_table(n: int, values, label: Callable[[int], object]) -> PropertyCheck:
    # full quantifier form: every S subset of T, every x outside T; tables are
    # bitmask-indexed so each comparison is an array lookup
    mono = None
    sub = None
    full = (1 << n) - 1
    for t in range(1 << n):
        s = t
        while True:
            s = (s - 1) & t
            if s == t:  # wrapped past 0
                break
            if mono is None and values[s] > values[t]:
                mono = (label(s), label(t))
            if sub is None:
                rest = full & ~t
                m = rest
                while m:
                    x = (m & -m).bit_length() - 1
                    bx = 1 << x
                    if values[s | bx] - values[s] < values[t | bx] - values[t]:
                        sub = (label(s), label(t), x)
                        break
                    m &= m - 1
            if mono is not None and sub is not None:
                return PropertyCheck(mono, sub)
            if s == 0:
                break
    return PropertyCheck(mono, sub)


def check_tabulated(n: int, f: Callable[[frozenset[int]], object]) -> PropertyCheck:
    """Exhaustive check of an arbitrary set function on {0..n-1}.

    Witness sets are frozensets of indices; the x in a submodularity witness
    is an index.
    """
    if n > CHECK_LIMIT:
        raise ValueError(f"exhaustive check limited to n <= {CHECK_LIMIT}, got {n}")
    subsets = [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]
    values = [f(s) for s in subsets]

    return _scan_table(n, values, lambda mask: subsets[mask])


def check_monotone_submodular(
    instance: CoverageInstance, counter: Optional[OracleCounter] = None
) -> PropertyCheck:
    """Exhaustive scan of the instance's coverage function (n <= 12).

    Evaluates f on all 2^n subsets (ticking the counter per evaluation),
    then checks every S subset of T pair.  Witness sets hold element names;
    the x in a submodularity witness is an element name.
    """
    n = instance.n
    if n > CHECK_LIMIT:
        raise ValueError(f"exhaustive check limited to n <= {CHECK_LIMIT}, got {n}")
    scaled = _scaled(instance)
    values = []
    for mask in range(1 << n):
        if counter is not None:
            counter.tick()
        values.append(scaled.value(mask))

    check = _scan_table(n, values, lambda mask: _names_of(instance, mask))
    if check.submodular_witness is not None:
        s, t, x = check.submodular_witness
        return PropertyCheck(
            check.monotone_witness, (s, t, instance.element_names[x])
        )
    return check


# ---------------------------------------------------------------------------
# optimization baselines


def _require_brute_size(instance: CoverageInstance) -> None:
    if instance.n > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {instance.n}"
        )


def brute_force_opt(
    instance: CoverageInstance, counter: Optional[OracleCounter] = None
) -> tuple[frozenset[str], Fraction]:
    """Exact optimum over all independent sets, by depth-first extension.

    Evaluates f exactly once per independent set (the empty set included).
    Ties go to the lexicographically smallest index sequence, which is the
    first maximum this visit order encounters.
    """
    _require_brute_size(instance)
    n = instance.n
    scaled = _scaled(instance)
    blocks = _block_masks(instance)
    rank_cap = instance.matroid.rank if blocks is None else n
    # every element sits in exactly one block, validated at construction
    elem_block = (
        None
        if blocks is None
        else [next((bm, cap) for bm, cap in blocks if bm >> i & 1) for i in range(n)]
    )

    best_mask = 0
    best_value = scaled.value(0)
    if counter is not None:
        counter.tick()

    def extend(mask: int, size: int, start: int) -> None:
        nonlocal best_mask, best_value
        if blocks is None and size >= rank_cap:
            return
        for i in range(start, n):
            if elem_block is not None:
                bm, cap = elem_block[i]
                if (mask & bm).bit_count() >= cap:
                    continue
            new_mask = mask | (1 << i)
            if counter is not None:
                counter.tick()
            new_value = scaled.value(new_mask)
            if new_value > best_value:
                best_value, best_mask = new_value, new_mask
            extend(new_mask, size + 1, i + 1)

    extend(0, 0, 0)
    return _names_of(instance, best_mask), Fraction(best_value, scaled.denominator)


def _mask_indices(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def brute_force_opt_by_mask(
    instance: CoverageInstance,
    counter: Optional[OracleCounter] = None,
    worker_count: int = 1,
) -> tuple[frozenset[str], Fraction]:
    """Second, independently coded enumerator: numeric mask order.

    Visits subsets in increasing bitmask order (a different order than the
    depth-first enumerator), applies the same lexicographic tie-break
    explicitly, and supports partitioned scanning with exact counter
    aggregation.
    """
    _require_brute_size(instance)
    n = instance.n
    scaled = _scaled(instance)
    blocks = _block_masks(instance)
    rank = instance.matroid.rank if blocks is None else None

    def independent(mask: int) -> bool:
        if blocks is None:
            return mask.bit_count() <= rank
        return all((mask & bm).bit_count() <= cap for bm, cap in blocks)

    def scan(lo: int, hi: int) -> tuple[Optional[int], int, int]:
        best_mask: Optional[int] = None
        best_value = -1
        ticks = 0
        for mask in range(lo, hi):
            if not independent(mask):
                continue
            ticks += 1
            value = scaled.value(mask)
            if value > best_value or (
                value == best_value
                and best_mask is not None
                and _mask_indices(mask) < _mask_indices(best_mask)
            ):
                best_value, best_mask = value, mask
        return best_mask, best_value, ticks

    total = 1 << n
    if worker_count <= 1:
        results = [scan(0, total)]
    else:
        step = -(-total // worker_count)
        spans = [(a, min(a + step, total)) for a in range(0, total, step)]
        with ThreadPoolExecutor(max_workers=worker_count) as pool:
            results = list(pool.map(lambda span: scan(*span), spans))

    best_mask: Optional[int] = None
    best_value = -1
    for mask, value, ticks in results:
        if counter is not None:
            counter.count += ticks
        if mask is None:
            continue
        if value > best_value or (
            value == best_value
            and best_mask is not None
            and _mask_indices(mask) < _mask_indices(best_mask)
        ):
            best_value, best_mask = value, mask
    assert best_mask is not None  # the empty set is always independent
    return _names_of(instance, best_mask), Fraction(best_value, scaled.denominator)


def greedy(
    instance: CoverageInstance, counter: Optional[OracleCounter] = None
) -> tuple[frozenset[str], Fraction]:
    """Classic matroid greedy: best positive marginal gain, ties by index.

    f(empty) = 0 is known for coverage without an oracle call; each round
    evaluates each feasible candidate once, so the call count stays within
    n * rank.
    """
    n = instance.n
    scaled = _scaled(instance)
    blocks = _block_masks(instance)
    rank = instance.matroid.rank if blocks is None else None

    mask = 0
    size = 0
    value = 0
    while True:
        best_gain = 0
        best_index = None
        for i in range(n):
            bit = 1 << i
            if mask & bit:
                continue
            if blocks is None:
                if size >= rank:
                    continue
            else:
                ok = all(
                    ((mask | bit) & bm).bit_count() <= cap for bm, cap in blocks
                )
                if not ok:
                    continue
            if counter is not None:
                counter.tick()
            gain = scaled.value(mask | bit) - value
            if gain > best_gain:
                best_gain, best_index = gain, i
        if best_index is None:
            break
        mask |= 1 << best_index
        size += 1
        value += best_gain
    return _names_of(instance, mask), Fraction(value, scaled.denominator)


# ---------------------------------------------------------------------------
# ratio targets


@dataclass(frozen=True)
class RatioReport:
    """Certified target versus exact baselines for one instance and slack."""

    eps: EpsSpec
    ell_star: int
    rho_star: Fraction
    rho_certified: bool
    threshold: Enclosure  # 1 - 1/e - eps
    f_opt: Fraction
    opt_set: tuple[str, ...]
    target_value: Fraction
    greedy_value: Fraction
    greedy_set: tuple[str, ...]
    empirical_ratio: Fraction
    oracle_calls_brute: int
    oracle_calls_greedy: int
    algorithm_output: str = LOCAL_SEARCH_NOTE
    seed: Optional[int] = None


def ratio_report(
    instance: CoverageInstance,
    eps: Union[EpsSpec, RationalLike],
    seed: Optional[int] = None,
    policy: RefinementPolicy = DEFAULT_POLICY,
) -> RatioReport:
    """Brute force, greedy, and the certified rho(ell_star) target.

    The certification is the planner's minimality contract surfaced
    end-to-end: rho(ell_star(eps)) >= 1 - 1/e - eps by certified comparison.
    """
    _require_brute_size(instance)
    spec = eps if isinstance(eps, EpsSpec) else EpsSpec.from_rational(eps)
    value = spec.eps

    brute_counter = OracleCounter()
    greedy_counter = OracleCounter()
    opt_set, f_opt = brute_force_opt(instance, brute_counter)
    greedy_set, greedy_value = greedy(instance, greedy_counter)

    star = ell_star(spec, policy)
    rho_star = rho(star)
    res = cmp_certified(
        const(rho_star), const(1) - inv_e() - const(value), policy
    )
    if res.verdict is Verdict.UNRESOLVED:
        raise PrecisionExhausted(
            f"rho({star}) vs 1 - 1/e - {value} unresolved at {policy.cap_bits} bits"
        )
    e_enc = enclose_e(64)
    threshold = Enclosure(1 - value - 1 / e_enc.lo, 1 - value - 1 / e_enc.hi)

    names = instance.element_names
    return RatioReport(
        eps=spec,
        ell_star=star,
        rho_star=rho_star,
        rho_certified=res.verdict is Verdict.GREATER,
        threshold=threshold,
        f_opt=f_opt,
        opt_set=tuple(sorted(opt_set, key=names.index)),
        target_value=rho_star * f_opt,
        greedy_value=greedy_value,
        greedy_set=tuple(sorted(greedy_set, key=names.index)),
        empirical_ratio=greedy_value / f_opt if f_opt else Fraction(1),
        oracle_calls_brute=brute_counter.count,
        oracle_calls_greedy=greedy_counter.count,
        seed=seed,
    )


def subset_query_cost(ell: int) -> int:
    """Materialize and count all subsets of a size-ell set (= 2^ell).

    This is the per-evaluation enumeration the 2^ell cost factor talks
    about, made concrete.
    """
    if not isinstance(ell, int) or isinstance(ell, bool) or ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell!r}")
    if ell > SUBSET_COST_LIMIT:
        raise ValueError(f"enumeration limited to ell <= {SUBSET_COST_LIMIT}")
    base = range(ell)
    count = 0
    for k in range(ell + 1):
        for _ in combinations(base, k):
            count += 1
    return count


# ---------------------------------------------------------------------------
# instance generation and the file format


def generate_random_instance(
    rng: random.Random, max_n: int = 10, max_items: int = 8
) -> CoverageInstance:
    """Seeded random coverage instance with a uniform or partition matroid.

    Weights use denominators from {1, 2, 4, 5, 10} so every instance
    serializes to exact decimals.
    """
    n = rng.randint(1, max_n)
    u = rng.randint(1, max_items)
    universe = tuple(
        (f"i{j}", Fraction(rng.randint(1, 100), rng.choice((1, 2, 4, 5, 10))))
        for j in range(u)
    )
    ground = tuple(
        (
            f"e{k}",
            frozenset(f"i{j}" for j in range(u) if rng.random() < 0.5),
        )
        for k in range(n)
    )
    if rng.random() < 0.5:
        matroid: Matroid = UniformMatroid(rng.randint(0, n))
    else:
        names = [name for name, _ in ground]
        rng.shuffle(names)
        block_count = rng.randint(1, min(3, n))
        cuts = sorted(rng.sample(range(1, n), block_count - 1)) if block_count > 1 else []
        bounds = [0, *cuts, n]
        blocks = []
        for a, b in zip(bounds, bounds[1:]):
            members = frozenset(names[a:b])
            blocks.append(PartitionBlock(members, rng.randint(0, b - a)))
        matroid = PartitionMatroid(tuple(blocks))
    return CoverageInstance(universe, ground, matroid)


def _decimal_text(value: Fraction) -> str:
    den = value.denominator
    rest = den
    for base in (2, 5):
        while rest % base == 0:
            rest //= base
    if rest != 1:
        raise ValueError(f"{value} has no terminating decimal form")
    k = 0
    scaled = value.numerator
    while scaled % den != 0:
        scaled *= 10
        k += 1
    digits = scaled // den
    if k == 0:
        return str(digits)
    text = str(digits).rjust(k + 1, "0")
    return f"{text[:-k]}.{text[-k:]}"


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise InstanceFormatError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _require_keys(obj: dict, path: str, required: set[str]) -> None:
    missing = required - obj.keys()
    unknown = obj.keys() - required
    if missing:
        raise InstanceFormatError(f"{path}: missing field(s) {sorted(missing)}")
    if unknown:
        raise InstanceFormatError(f"{path}: unknown field(s) {sorted(unknown)}")


def _as_weight(value, path: str) -> Fraction:
    if isinstance(value, str):
        # exact-decimal text form, what instance_to_jsonable emits
        try:
            value = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceFormatError(f"{path}: bad weight text {value!r}") from exc
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise InstanceFormatError(f"{path}: weight must be a decimal number")
    weight = Fraction(value)
    if weight <= 0:
        raise InstanceFormatError(f"{path}: weight must be positive, got {weight}")
    return weight


def _as_name_list(value, path: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise InstanceFormatError(f"{path}: expected a list of names")
    if len(set(value)) != len(value):
        raise InstanceFormatError(f"{path}: duplicate names")
    return value


def parse_instance(text: str) -> CoverageInstance:
    """Parse the structured instance format; weights become exact rationals.

    Unknown or missing fields are rejected with the offending field path.
    """
    try:
        raw = json.loads(
            text, parse_float=Fraction, object_pairs_hook=_reject_duplicates
        )
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid instance text: {exc}") from exc
    if not isinstance(raw, dict):
        raise InstanceFormatError("top level must be an object")
    _require_keys(raw, "top level", {"universe", "ground", "matroid"})

    if not isinstance(raw["universe"], dict):
        raise InstanceFormatError("universe: expected an object of weights")
    universe = tuple(
        (name, _as_weight(value, f"universe.{name}"))
        for name, value in raw["universe"].items()
    )

    if not isinstance(raw["ground"], dict):
        raise InstanceFormatError("ground: expected an object of member lists")
    ground = tuple(
        (name, frozenset(_as_name_list(members, f"ground.{name}")))
        for name, members in raw["ground"].items()
    )

    m = raw["matroid"]
    if not isinstance(m, dict):
        raise InstanceFormatError("matroid: expected an object")
    kind = m.get("type")
    if kind == "uniform":
        _require_keys(m, "matroid", {"type", "rank"})
        rank = m["rank"]
        if isinstance(rank, bool) or not isinstance(rank, int) or rank < 0:
            raise InstanceFormatError("matroid.rank: expected a nonnegative integer")
        matroid: Matroid = UniformMatroid(rank)
    elif kind == "partition":
        _require_keys(m, "matroid", {"type", "blocks"})
        if not isinstance(m["blocks"], list) or not m["blocks"]:
            raise InstanceFormatError("matroid.blocks: expected a non-empty list")
        blocks = []
        for i, entry in enumerate(m["blocks"]):
            path = f"matroid.blocks[{i}]"
            if not isinstance(entry, dict):
                raise InstanceFormatError(f"{path}: expected an object")
            _require_keys(entry, path, {"members", "capacity"})
            members = _as_name_list(entry["members"], f"{path}.members")
            cap = entry["capacity"]
            if isinstance(cap, bool) or not isinstance(cap, int) or cap < 0:
                raise InstanceFormatError(
                    f"{path}.capacity: expected a nonnegative integer"
                )
            blocks.append(PartitionBlock(frozenset(members), cap))
        matroid = PartitionMatroid(tuple(blocks))
    else:
        raise InstanceFormatError(
            f"matroid.type: expected 'uniform' or 'partition', got {kind!r}"
        )

    try:
        return CoverageInstance(universe, ground, matroid)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def load_instance(path) -> CoverageInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


BUNDLED_INSTANCES = ("three_cover", "greedy_gap")


def bundled_instance(name: str) -> CoverageInstance:
    """Load one of the instances shipped with the package.

    three_cover: three covering elements under a rank-2 uniform matroid;
    greedy is optimal (value 3).  greedy_gap: a partition instance where
    greedy's first pick blocks the better block choice (greedy 10, OPT 19).
    """
    if name not in BUNDLED_INSTANCES:
        raise KeyError(f"no bundled instance {name!r}; have {BUNDLED_INSTANCES}")
    return load_instance(Path(__file__).resolve().parent / "data" / f"{name}.json")


def instance_to_jsonable(instance: CoverageInstance) -> dict:
    """Inverse of parse_instance, for round-trips and report attachments."""
    out: dict = {
        "universe": {name: _decimal_text(w) for name, w in instance.universe},
        "ground": {name: sorted(members) for name, members in instance.ground},
    }
    if isinstance(instance.matroid, UniformMatroid):
        out["matroid"] = {"type": "uniform", "rank": instance.matroid.rank}
    else:
        out["matroid"] = {
            "type": "partition",
            "blocks": [
                {"members": sorted(b.members), "capacity": b.capacity}
                for b in instance.matroid.blocks
            ],
        }
    return out
