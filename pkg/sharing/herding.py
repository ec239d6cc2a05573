"""
Desk-scale herding demo on a truncated iterative hash.

The compression function C(h, m) is the first u bits of the base hash of
(u-bit chaining value || 64-bit block), both big-endian. Searches are
birthday-table based and bounded by BUDGET_FACTOR times their expected
cost, so a failed search raises instead of hanging.
"""

import itertools
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from utils.config import (
    BUDGET_FACTOR,
    DEMO_BLOCK_BITS,
    DEMO_MAX_WIDTH,
    DEMO_MIN_WIDTH,
    SEARCH_WORKERS,
)
from utils.logging_helper import get_module_logger
from utils.rng import RandomSource, make_rng

from .errors import BudgetExceededError, ParameterError
from .hss import HashSpec

logger = get_module_logger(__name__)

BLOCK_BYTES = DEMO_BLOCK_BITS // 8


class TruncatedIterativeHash:
    """Merkle-Damgard chain over a truncated compression function, with a call counter."""

    def __init__(self, u: int, base: Optional[HashSpec] = None, iv: int = 0):
        if u % 2 or u < DEMO_MIN_WIDTH or u > DEMO_MAX_WIDTH:
            raise ParameterError(f"u must be even and in {DEMO_MIN_WIDTH}..{DEMO_MAX_WIDTH}, got {u}")
        self.u = u
        self.v = DEMO_BLOCK_BITS
        self.base = base or HashSpec()
        if self.base.truncation_bits is not None:
            raise ParameterError("base hash for the demo must not itself be truncated")
        self.iv = iv & self.mask
        self.calls = 0
        self._chain_bytes = (u + 7) // 8
        self._shift = self.base.digest_length * 8 - u

    @property
    def mask(self) -> int:
        return (1 << self.u) - 1

    def params(self) -> Tuple[int, str, int]:
        return self.u, self.base.algorithm, self.iv

    def compress(self, chaining: int, block: int) -> int:
        self.calls += 1
        data = chaining.to_bytes(self._chain_bytes, "big") + block.to_bytes(BLOCK_BYTES, "big")
        return int.from_bytes(self.base.digest(data), "big") >> self._shift

    def hash_blocks(self, blocks: Sequence[int], start: Optional[int] = None) -> int:
        h = self.iv if start is None else start
        for block in blocks:
            h = self.compress(h, block)
        return h

    def reset_counter(self) -> int:
        calls, self.calls = self.calls, 0
        return calls


def prefix_blocks(prefix: bytes) -> List[int]:
    """Split into 64-bit big-endian blocks, zero-padding the last on the right."""
    if not prefix:
        return []
    padded = prefix + b"\x00" * (-len(prefix) % BLOCK_BYTES)
    return [
        int.from_bytes(padded[i:i + BLOCK_BYTES], "big")
        for i in range(0, len(padded), BLOCK_BYTES)
    ]


def _random_block(rng: RandomSource) -> int:
    return int.from_bytes(rng.token_bytes(BLOCK_BYTES), "big")


def collision_budget(u: int) -> int:
    return BUDGET_FACTOR * 2 ** (u // 2)


def linking_budget(u: int, w: int) -> int:
    return BUDGET_FACTOR * 2**u // w


@dataclass(frozen=True)
class CollisionPair:
    chaining_in: int
    block_a: int
    block_b: int
    chaining_out: int
    calls: int = field(default=0, compare=False)


@dataclass
class Multicollision:
    pairs: List[CollisionPair]
    calls: int

    @property
    def b(self) -> int:
        return len(self.pairs)

    @property
    def final_hash(self) -> int:
        return self.pairs[-1].chaining_out

    def messages(self) -> Iterator[Tuple[int, ...]]:
        """All 2^b block sequences, one choice per pair."""
        return itertools.product(*[(p.block_a, p.block_b) for p in self.pairs])


@dataclass
class DiamondStructure:
    """
    levels[0] holds the w leaf chaining values, levels[-1] the single
    final hash. linking_blocks[l][j] maps levels[l][j] to levels[l+1][j // 2].
    Nodes are indexed level-major.
    """

    width: int
    levels: List[List[int]]
    linking_blocks: List[List[int]]
    calls: int = 0

    @property
    def final_hash(self) -> int:
        return self.levels[-1][0]

    def suffix(self, leaf_index: int) -> List[int]:
        blocks = []
        index = leaf_index
        for level_blocks in self.linking_blocks:
            blocks.append(level_blocks[index])
            index //= 2
        return blocks


@dataclass
class HerdedMessage:
    prefix: bytes
    prefix_blocks: List[int]
    linking_block: int
    leaf_index: int
    suffix: List[int]
    trials: int

    def blocks(self) -> List[int]:
        return self.prefix_blocks + [self.linking_block] + self.suffix


def _birthday_search(hash_fn: TruncatedIterativeHash, chaining_in: int, rng: RandomSource, budget: int):
    seen: Dict[int, int] = {}
    start = hash_fn.calls
    while hash_fn.calls - start < budget:
        block = _random_block(rng)
        out = hash_fn.compress(chaining_in, block)
        other = seen.get(out)
        if other is not None and other != block:
            return CollisionPair(chaining_in, other, block, out, calls=hash_fn.calls - start)
        seen[out] = block
    return None


def _collision_worker(args):
    u, algorithm, iv, chaining_in, seed, budget = args
    hash_fn = TruncatedIterativeHash(u, HashSpec(algorithm), iv)
    pair = _birthday_search(hash_fn, chaining_in, make_rng(seed), budget)
    return pair, hash_fn.calls


def find_collision(
    chaining_in: int,
    hash_fn: TruncatedIterativeHash,
    rng: Optional[RandomSource] = None,
    workers: int = SEARCH_WORKERS,
    budget: Optional[int] = None,
) -> CollisionPair:
    """Two distinct blocks with C(chaining_in, a) == C(chaining_in, b)."""
    rng = rng or make_rng()
    budget = budget or collision_budget(hash_fn.u)

    if workers <= 1:
        pair = _birthday_search(hash_fn, chaining_in, rng, budget)
        if pair is None:
            raise BudgetExceededError(f"no collision within {budget} compression calls", calls=budget)
        return pair

    u, algorithm, iv = hash_fn.params()
    jobs = [(u, algorithm, iv, chaining_in, rng.spawn_seed(), budget // workers) for _ in range(workers)]
    total = 0
    with Pool(workers) as pool:
        for pair, calls in pool.imap_unordered(_collision_worker, jobs):
            total += calls
            if pair is not None:
                pool.terminate()
                hash_fn.calls += total
                return CollisionPair(pair.chaining_in, pair.block_a, pair.block_b, pair.chaining_out, calls=total)
    hash_fn.calls += total
    raise BudgetExceededError(f"no collision within {budget} compression calls", calls=total)


def build_multicollision(
    b: int,
    hash_fn: TruncatedIterativeHash,
    rng: Optional[RandomSource] = None,
    workers: int = SEARCH_WORKERS,
) -> Multicollision:
    """b chained collision pairs giving 2^b messages with one hash."""
    if b < 1 or b > 20:
        raise ParameterError(f"b must be in 1..20, got {b}")
    rng = rng or make_rng()

    pairs = []
    chaining = hash_fn.iv
    for _ in range(b):
        pair = find_collision(chaining, hash_fn, rng, workers)
        pairs.append(pair)
        chaining = pair.chaining_out
    calls = sum(p.calls for p in pairs)
    logger.info(f"✅ Multicollision b={b}, u={hash_fn.u}: {calls} compression calls")
    return Multicollision(pairs=pairs, calls=calls)


def _merge_pair(
    hash_fn: TruncatedIterativeHash, left: int, right: int, rng: RandomSource, budget: int
) -> Optional[Tuple[int, int, int]]:
    """Blocks m_l, m_r with C(left, m_l) == C(right, m_r)."""
    from_left: Dict[int, int] = {}
    from_right: Dict[int, int] = {}
    start = hash_fn.calls
    while hash_fn.calls - start < budget:
        block = _random_block(rng)
        out = hash_fn.compress(left, block)
        if out in from_right:
            return block, from_right[out], out
        from_left.setdefault(out, block)

        block = _random_block(rng)
        out = hash_fn.compress(right, block)
        if out in from_left:
            return from_left[out], block, out
        from_right.setdefault(out, block)
    return None


def build_diamond(
    w: int, hash_fn: TruncatedIterativeHash, rng: Optional[RandomSource] = None
) -> DiamondStructure:
    if w < 1 or w > 64 or w & (w - 1):
        raise ParameterError(f"w must be a power of two up to 64, got {w}")
    rng = rng or make_rng()
    start = hash_fn.calls
    budget = collision_budget(hash_fn.u)

    leaves: List[int] = []
    while len(leaves) < w:
        candidate = rng.randbelow(1 << hash_fn.u)
        if candidate not in leaves:
            leaves.append(candidate)

    levels = [leaves]
    linking_blocks: List[List[int]] = []
    while len(levels[-1]) > 1:
        current = levels[-1]
        parents, blocks = [], []
        for j in range(0, len(current), 2):
            merged = _merge_pair(hash_fn, current[j], current[j + 1], rng, budget)
            if merged is None:
                raise BudgetExceededError(
                    f"diamond merge at level {len(levels)} exceeded {budget} calls",
                    calls=hash_fn.calls - start,
                )
            block_l, block_r, parent = merged
            blocks.extend([block_l, block_r])
            parents.append(parent)
        linking_blocks.append(blocks)
        levels.append(parents)

    diamond = DiamondStructure(width=w, levels=levels, linking_blocks=linking_blocks, calls=hash_fn.calls - start)
    logger.info(f"✅ Diamond w={w}, u={hash_fn.u}: {len(levels)} levels, {diamond.calls} calls")
    return diamond


def _linking_search(hash_fn, start_value, leaves: Dict[int, int], rng: RandomSource, budget: int):
    start = hash_fn.calls
    while hash_fn.calls - start < budget:
        block = _random_block(rng)
        out = hash_fn.compress(start_value, block)
        if out in leaves:
            return block, leaves[out], hash_fn.calls - start
    return None


def _linking_worker(args):
    u, algorithm, iv, start_value, leaves, seed, budget = args
    hash_fn = TruncatedIterativeHash(u, HashSpec(algorithm), iv)
    found = _linking_search(hash_fn, start_value, leaves, make_rng(seed), budget)
    return found, hash_fn.calls


def herd_prefix(
    prefix: bytes,
    diamond: DiamondStructure,
    hash_fn: TruncatedIterativeHash,
    rng: Optional[RandomSource] = None,
    workers: int = SEARCH_WORKERS,
) -> HerdedMessage:
    """Find M* linking the prefix's chaining value to a diamond leaf."""
    rng = rng or make_rng()
    blocks = prefix_blocks(prefix)
    start_value = hash_fn.hash_blocks(blocks)
    leaves = {value: index for index, value in enumerate(diamond.levels[0])}
    budget = linking_budget(hash_fn.u, diamond.width)

    if workers <= 1:
        found = _linking_search(hash_fn, start_value, leaves, rng, budget)
    else:
        u, algorithm, iv = hash_fn.params()
        jobs = [
            (u, algorithm, iv, start_value, leaves, rng.spawn_seed(), budget // workers)
            for _ in range(workers)
        ]
        found, total = None, 0
        with Pool(workers) as pool:
            for result, calls in pool.imap_unordered(_linking_worker, jobs):
                total += calls
                if result is not None:
                    found = (result[0], result[1], total)
                    pool.terminate()
                    break
        hash_fn.calls += total

    if found is None:
        raise BudgetExceededError(f"no linking block within {budget} trials", calls=budget)
    linking_block, leaf_index, trials = found
    return HerdedMessage(
        prefix=prefix,
        prefix_blocks=blocks,
        linking_block=linking_block,
        leaf_index=leaf_index,
        suffix=diamond.suffix(leaf_index),
        trials=trials,
    )


def verify_collision(pair: CollisionPair, hash_fn: TruncatedIterativeHash) -> bool:
    return (
        pair.block_a != pair.block_b
        and hash_fn.compress(pair.chaining_in, pair.block_a) == pair.chaining_out
        and hash_fn.compress(pair.chaining_in, pair.block_b) == pair.chaining_out
    )


def verify_diamond(diamond: DiamondStructure, hash_fn: TruncatedIterativeHash) -> bool:
    """Replay every leaf-to-root path."""
    return all(
        hash_fn.hash_blocks(diamond.suffix(i), start=leaf) == diamond.final_hash
        for i, leaf in enumerate(diamond.levels[0])
    )


def verify_herded(message: HerdedMessage, diamond: DiamondStructure, hash_fn: TruncatedIterativeHash) -> bool:
    return hash_fn.hash_blocks(message.blocks()) == diamond.final_hash


def measure_linking_cost(
    hash_fn: TruncatedIterativeHash,
    diamond: DiamondStructure,
    trials: int,
    rng: Optional[RandomSource] = None,
) -> pd.DataFrame:
    """Herd `trials` random prefixes and tabulate linking cost against 2^u / w."""
    rng = rng or make_rng()
    expected = 2**hash_fn.u / diamond.width
    rows = []
    for trial in range(trials):
        prefix = rng.token_bytes(16)
        message = herd_prefix(prefix, diamond, hash_fn, rng, workers=1)
        rows.append({
            "trial": trial,
            "prefix": prefix.hex(),
            "leaf_index": message.leaf_index,
            "trials": message.trials,
            "verified": verify_herded(message, diamond, hash_fn),
        })
    df = pd.DataFrame(rows)
    mean = float(df["trials"].mean()) if rows else 0.0
    df.attrs["expected"] = expected
    df.attrs["mean"] = mean
    df.attrs["median"] = float(df["trials"].median()) if rows else 0.0
    df.attrs["ratio"] = mean / expected if expected else 0.0
    logger.info(f"Linking cost over {trials} prefixes: mean {mean:.0f}, expected {expected:.0f}")
    return df
