"""
Monotone access structures, held as their basis of minimal authorized
subsets. Participants are 1-based integers; a subset is a strictly
ascending tuple; a basis is a lexicographically sorted antichain.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Sequence, Tuple

from utils.config import MAX_PARTICIPANTS
from utils.logging_helper import get_module_logger

from .errors import AccessStructureError, UnauthorizedSubsetError

logger = get_module_logger(__name__)

Subset = Tuple[int, ...]


def canonical_subset(members: Iterable[int], n: int) -> Subset:
    """Sort and validate a subset of participants 1..n."""
    members = list(members)
    if not members:
        raise AccessStructureError("subset must not be empty")
    for p in members:
        if isinstance(p, bool) or not isinstance(p, int):
            raise AccessStructureError(f"participant id {p!r} is not an integer")
        if p < 1 or p > n:
            raise AccessStructureError(f"participant id {p} out of range 1..{n}")
    subset = tuple(sorted(members))
    if len(set(subset)) != len(subset):
        raise AccessStructureError(f"duplicate participant in {list(members)}")
    return subset


def subset_key(subset: Sequence[int]) -> str:
    """Public-area key K_i: ascending ids joined by ','."""
    return ",".join(str(p) for p in subset)


def parse_subset_key(key: str, n: int) -> Subset:
    try:
        members = [int(part) for part in key.split(",")]
    except ValueError:
        raise AccessStructureError(f"malformed subset key {key!r}")
    subset = canonical_subset(members, n)
    if subset_key(subset) != key:
        raise AccessStructureError(f"subset key {key!r} is not canonical")
    return subset


@dataclass(frozen=True)
class AccessStructureBasis:
    n: int
    minimal_subsets: Tuple[Subset, ...]
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise AccessStructureError(f"participant count must be a positive integer, got {self.n!r}")
        if not self.minimal_subsets:
            raise AccessStructureError("basis must contain at least one subset")

        subsets = sorted({canonical_subset(s, self.n) for s in self.minimal_subsets})
        if len(subsets) != len(self.minimal_subsets):
            raise AccessStructureError("basis contains duplicate subsets")

        as_sets = [frozenset(s) for s in subsets]
        for a, b in itertools.combinations(range(len(as_sets)), 2):
            if as_sets[a] <= as_sets[b] or as_sets[b] <= as_sets[a]:
                raise AccessStructureError(
                    f"basis is not an antichain: {list(subsets[a])} and {list(subsets[b])}; "
                    "use minimize() to normalize a family"
                )
        object.__setattr__(self, "minimal_subsets", tuple(subsets))

    def __len__(self):
        return len(self.minimal_subsets)

    def __iter__(self):
        return iter(self.minimal_subsets)

    def keys(self) -> List[str]:
        return [subset_key(s) for s in self.minimal_subsets]

    def validation_warnings(self) -> Tuple[str, ...]:
        return self.warnings

    def to_json(self) -> str:
        return json.dumps([list(s) for s in self.minimal_subsets], separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, n: int) -> "AccessStructureBasis":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise AccessStructureError(f"basis is not valid JSON: {e}")
        if not isinstance(raw, list) or not all(isinstance(s, list) for s in raw):
            raise AccessStructureError("basis must be a JSON array of arrays of integers")
        return cls(n=n, minimal_subsets=tuple(tuple(s) for s in raw))


@dataclass(frozen=True)
class HierarchicalSpec:
    """Levels U_1..U_m with strictly increasing cumulative thresholds k_1..k_m."""

    levels: Tuple[Tuple[int, ...], ...]
    thresholds: Tuple[int, ...]
    conjunctive: bool = True
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(tuple(sorted(level)) for level in self.levels))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        members = [p for level in self.levels for p in level]
        if not self.n:
            object.__setattr__(self, "n", max(members, default=0))

        if not self.levels:
            raise AccessStructureError("hierarchical spec needs at least one level")
        if len(self.levels) != len(self.thresholds):
            raise AccessStructureError(
                f"{len(self.levels)} levels but {len(self.thresholds)} thresholds"
            )
        if not members:
            raise AccessStructureError("hierarchical spec has no participants")
        if len(set(members)) != len(members):
            raise AccessStructureError("hierarchical levels must be pairwise disjoint")
        for p in members:
            if p < 1 or p > self.n:
                raise AccessStructureError(f"participant id {p} out of range 1..{self.n}")
        if self.thresholds[0] < 1:
            raise AccessStructureError("thresholds must be positive")
        if any(a >= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise AccessStructureError(f"thresholds {list(self.thresholds)} are not strictly increasing")

    @property
    def mode(self) -> str:
        return "conjunctive" if self.conjunctive else "disjunctive"

    def empty_levels(self) -> List[int]:
        return [i + 1 for i, level in enumerate(self.levels) if not level]

    def predicate(self) -> Callable[[frozenset], bool]:
        cumulative = []
        running = set()
        for level in self.levels:
            running |= set(level)
            cumulative.append(frozenset(running))
        pairs = list(zip(cumulative, self.thresholds))
        combine = all if self.conjunctive else any
        return lambda v: combine(len(v & cum) >= k for cum, k in pairs)


@dataclass(frozen=True)
class CompartmentSpec:
    """Compartments U_1..U_m with per-compartment thresholds and an overall t."""

    compartments: Tuple[Tuple[int, ...], ...]
    per_thresholds: Tuple[int, ...]
    overall: int
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "compartments", tuple(tuple(sorted(c)) for c in self.compartments))
        object.__setattr__(self, "per_thresholds", tuple(self.per_thresholds))
        members = [p for c in self.compartments for p in c]
        if not self.n:
            object.__setattr__(self, "n", max(members, default=0))

        if not self.compartments:
            raise AccessStructureError("compartment spec needs at least one compartment")
        if any(not c for c in self.compartments):
            raise AccessStructureError("empty compartments are not allowed")
        if len(self.compartments) != len(self.per_thresholds):
            raise AccessStructureError(
                f"{len(self.compartments)} compartments but {len(self.per_thresholds)} thresholds"
            )
        if len(set(members)) != len(members):
            raise AccessStructureError("compartments must be pairwise disjoint")
        for p in members:
            if p < 1 or p > self.n:
                raise AccessStructureError(f"participant id {p} out of range 1..{self.n}")
        for i, (c, t_i) in enumerate(zip(self.compartments, self.per_thresholds), start=1):
            if t_i < 0 or t_i > len(c):
                raise AccessStructureError(f"threshold t_{i}={t_i} outside 0..{len(c)}")
        if self.overall < sum(self.per_thresholds):
            raise AccessStructureError(
                f"overall threshold {self.overall} below sum of compartment thresholds"
            )
        if self.overall < 1 or self.overall > len(members):
            raise AccessStructureError(f"overall threshold {self.overall} outside 1..{len(members)}")

    def predicate(self) -> Callable[[frozenset], bool]:
        groups = [(frozenset(c), t_i) for c, t_i in zip(self.compartments, self.per_thresholds)]
        overall = self.overall
        return lambda v: len(v) >= overall and all(len(v & c) >= t_i for c, t_i in groups)


def minimize(family: Iterable[Iterable[int]], n: int) -> AccessStructureBasis:
    """Reduce a family of authorized subsets to its inclusion-minimal antichain."""
    subsets = {canonical_subset(s, n) for s in family}
    if not subsets:
        raise AccessStructureError("cannot minimize an empty family")

    kept: List[frozenset] = []
    for s in sorted(subsets, key=lambda s: (len(s), s)):
        candidate = frozenset(s)
        if not any(k <= candidate for k in kept):
            kept.append(candidate)
    return AccessStructureBasis(n=n, minimal_subsets=tuple(tuple(sorted(k)) for k in kept))


def is_authorized(subset: Iterable[int], basis: AccessStructureBasis) -> bool:
    members = frozenset(canonical_subset(subset, basis.n))
    return any(frozenset(b) <= members for b in basis)


def reduce_to_basis(subset: Iterable[int], basis: AccessStructureBasis) -> Subset:
    """
    First basis element (canonical order) contained in `subset`.

    Ties go to the lexicographically smallest element, so on the 1,2|3,4|5,6
    hierarchy with k=(1,2,3) the set {2,3,4,5,6} reduces to {2,3,4}, not
    to {2,3,5} as a listing in another order would suggest.
    """
    members = frozenset(canonical_subset(subset, basis.n))
    for b in basis:
        if frozenset(b) <= members:
            return b
    raise UnauthorizedSubsetError(f"subset {sorted(members)} is not authorized")


def threshold_basis(t_plus_1: int, n: int) -> AccessStructureBasis:
    if n < 1:
        raise AccessStructureError(f"participant count must be positive, got {n}")
    if t_plus_1 < 1 or t_plus_1 > n:
        raise AccessStructureError(f"threshold {t_plus_1} outside 1..{n}")
    subsets = tuple(itertools.combinations(range(1, n + 1), t_plus_1))
    assert len(subsets) == math.comb(n, t_plus_1)
    logger.info(f"Built ({t_plus_1}, {n}) threshold basis with {len(subsets)} subsets")
    return AccessStructureBasis(n=n, minimal_subsets=subsets)


def _minimal_by_size(members: Sequence[int], predicate: Callable[[frozenset], bool]) -> List[Subset]:
    """
    Enumerate subsets of `members` in increasing size, keeping those that
    satisfy a monotone predicate and contain no smaller satisfying set.
    """
    if len(members) > MAX_PARTICIPANTS:
        raise AccessStructureError(
            f"{len(members)} participants exceeds enumeration limit {MAX_PARTICIPANTS}"
        )
    found: List[frozenset] = []
    for size in range(1, len(members) + 1):
        for combo in itertools.combinations(members, size):
            candidate = frozenset(combo)
            if any(f <= candidate for f in found):
                continue
            if predicate(candidate):
                found.append(candidate)
    return [tuple(sorted(f)) for f in found]


def hierarchical_basis(spec: HierarchicalSpec) -> AccessStructureBasis:
    warnings = tuple(f"level {i} is empty" for i in spec.empty_levels())
    for w in warnings:
        logger.warning(f"⚠️ Hierarchical spec: {w}")

    members = sorted(p for level in spec.levels for p in level)
    minimal = _minimal_by_size(members, spec.predicate())
    if not minimal:
        raise AccessStructureError(f"{spec.mode} hierarchical spec admits no authorized subset")
    logger.info(f"Built {spec.mode} hierarchical basis with {len(minimal)} subsets")
    return AccessStructureBasis(n=spec.n, minimal_subsets=tuple(minimal), warnings=warnings)


def compartment_basis(spec: CompartmentSpec) -> AccessStructureBasis:
    members = sorted(p for c in spec.compartments for p in c)
    minimal = _minimal_by_size(members, spec.predicate())
    if not minimal:
        raise AccessStructureError("compartment spec admits no authorized subset")
    logger.info(f"Built compartment basis with {len(minimal)} subsets")
    return AccessStructureBasis(n=spec.n, minimal_subsets=tuple(minimal))


def basis_from_predicate(predicate: Callable[[frozenset], bool], n: int) -> AccessStructureBasis:
    """Exhaustive oracle: filter all 2^n subsets, then minimize."""
    universe = range(1, n + 1)
    family = [
        combo
        for size in range(1, n + 1)
        for combo in itertools.combinations(universe, size)
        if predicate(frozenset(combo))
    ]
    return minimize(family, n)
