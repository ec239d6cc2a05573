"""
Hash-herding secret sharing.

Every participant holds a random share the size of the hash digest. For
each minimal authorized subset A_i the dealer hashes the concatenated
shares of A_i (ascending participant order) into h_i and publishes the
control value c_i = h_i XOR h under the key "i1,i2,...". Any minimal
authorized subset recovers h = H(s_i1 || ... || s_ib) XOR c_i.
"""

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from utils.config import COMMITMENT_PREFIX, DEFAULT_HASH, MAX_VERSION, SETUP_WORKERS
from utils.logging_helper import get_module_logger
from utils.rng import RandomSource, make_rng

from .access_structures import (
    AccessStructureBasis,
    Subset,
    canonical_subset,
    parse_subset_key,
    subset_key,
)
from .errors import (
    AccessStructureError,
    CommitmentsMissingError,
    ParameterError,
    SecretLengthError,
    ShareError,
    UnknownSubsetKeyError,
    VersionOverflowError,
)

logger = get_module_logger(__name__)


@dataclass(frozen=True)
class HashSpec:
    algorithm: str = DEFAULT_HASH
    truncation_bits: Optional[int] = None

    def __post_init__(self):
        try:
            size = hashlib.new(self.algorithm).digest_size
        except (ValueError, TypeError):
            raise ParameterError(f"unknown hash algorithm {self.algorithm!r}")
        if size == 0:
            raise ParameterError(f"hash {self.algorithm!r} has no fixed digest size")

        if self.truncation_bits is None:
            if size < 16:
                raise ParameterError(f"hash {self.algorithm!r} digest shorter than 16 bytes")
        else:
            bits = self.truncation_bits
            if bits < 2 or bits > 32 or bits % 2:
                raise ParameterError(f"truncation_bits must be even and in 2..32, got {bits}")

    @property
    def digest_length(self) -> int:
        if self.truncation_bits is None:
            return hashlib.new(self.algorithm).digest_size
        return (self.truncation_bits + 7) // 8

    @property
    def label(self) -> str:
        if self.truncation_bits is None:
            return self.algorithm
        return f"{self.algorithm}/{self.truncation_bits}"

    @classmethod
    def from_label(cls, label: str) -> "HashSpec":
        if "/" in label:
            algorithm, bits = label.split("/", 1)
            if not bits.isdigit():
                raise ParameterError(f"malformed hash label {label!r}")
            return cls(algorithm=algorithm, truncation_bits=int(bits))
        return cls(algorithm=label)

    def digest(self, data: bytes) -> bytes:
        full = hashlib.new(self.algorithm, data).digest()
        if self.truncation_bits is None:
            return full
        # keep the first truncation_bits bits, big-endian
        value = int.from_bytes(full, "big") >> (len(full) * 8 - self.truncation_bits)
        return value.to_bytes(self.digest_length, "big")


@dataclass(frozen=True)
class Share:
    participant: int
    value: bytes

    def __repr__(self):
        return f"Share(participant={self.participant}, value=<{len(self.value)} bytes>)"


@dataclass(frozen=True)
class SecretDigest:
    value: bytes

    def hex(self) -> str:
        return self.value.hex()

    def __repr__(self):
        return f"SecretDigest(<{len(self.value)} bytes>)"


@dataclass(frozen=True)
class ControlEntry:
    key: str
    value: bytes


@dataclass(frozen=True)
class PublicControlArea:
    version: int
    hash_spec: HashSpec
    basis: AccessStructureBasis
    entries: Mapping[str, ControlEntry]
    commitments: Optional[Mapping[int, bytes]] = None
    scheme_id: str = ""

    def __post_init__(self):
        length = self.hash_spec.digest_length
        if self.version < 1:
            raise AccessStructureError(f"version must be >= 1, got {self.version}")
        if set(self.entries) != set(self.basis.keys()) or len(self.entries) != len(self.basis):
            raise AccessStructureError("control entries do not match the basis keys")
        for key, entry in self.entries.items():
            if entry.key != key:
                raise AccessStructureError(f"entry stored under {key!r} claims key {entry.key!r}")
            parse_subset_key(key, self.basis.n)
            if len(entry.value) != length:
                raise AccessStructureError(f"control value for {key} is not {length} bytes")
        if self.commitments is not None:
            for participant, g_i in self.commitments.items():
                if participant < 1 or participant > self.n:
                    raise AccessStructureError(f"commitment for unknown participant {participant}")
                if len(g_i) != length:
                    raise AccessStructureError(f"commitment for {participant} is not {length} bytes")

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def w(self) -> int:
        return len(self.entries)

    def control_value(self, subset: Sequence[int]) -> bytes:
        key = subset_key(subset)
        entry = self.entries.get(key)
        if entry is None:
            raise UnknownSubsetKeyError(
                f"no control entry for {{{key}}}: not a minimal authorized subset"
            )
        return entry.value


@dataclass(frozen=True)
class DealerOutput:
    shares: Tuple[Share, ...]
    public: PublicControlArea
    secret: SecretDigest = field(repr=False)


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ShareError(f"cannot XOR {len(a)}-byte and {len(b)}-byte strings")
    return bytes(x ^ y for x, y in zip(a, b))


def _check_share_length(share: Share, length: int) -> None:
    if len(share.value) != length:
        raise ShareError(
            f"share of participant {share.participant} is {len(share.value)} bytes, expected {length}"
        )


def private_message(shares_of_subset: Iterable[Share], subset: Sequence[int]) -> bytes:
    """M_priv: the subset's shares concatenated in ascending participant order."""
    shares = sorted(shares_of_subset, key=lambda s: s.participant)
    participants = [s.participant for s in shares]
    if len(set(participants)) != len(participants):
        raise ShareError(f"duplicate participant among shares {participants}")

    members = sorted(subset)
    if participants != members:
        missing = sorted(set(members) - set(participants))
        extra = sorted(set(participants) - set(members))
        raise ShareError(f"shares do not match subset {members}: missing {missing}, extra {extra}")

    lengths = {len(s.value) for s in shares}
    if len(lengths) > 1:
        raise ShareError(f"shares have mixed lengths {sorted(lengths)}")
    return b"".join(s.value for s in shares)


def _subset_digests(
    shares: Sequence[Share], basis: AccessStructureBasis, hash_spec: HashSpec, workers: int
) -> List[bytes]:
    by_id = {s.participant: s for s in shares}

    def digest_for(subset: Subset) -> bytes:
        return hash_spec.digest(private_message([by_id[p] for p in subset], subset))

    if workers <= 1:
        return [digest_for(s) for s in basis]
    # Executor.map preserves input order, so the result is order-independent
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(digest_for, basis))


def setup(
    basis: AccessStructureBasis,
    hash_spec: Optional[HashSpec] = None,
    fixed_secret: Optional[bytes] = None,
    rng: Optional[RandomSource] = None,
    verifiable: bool = False,
    workers: int = SETUP_WORKERS,
    version: int = 1,
    scheme_id: Optional[str] = None,
) -> DealerOutput:
    """
    Dealer setup. Draws one share per participant, hashes the private
    message of every minimal authorized subset and publishes
    c_i = H(M_priv_i) XOR h. Without `fixed_secret` the secret is h_1,
    the digest of the first basis element, so c_1 is all zeros.
    """
    hash_spec = hash_spec or HashSpec()
    rng = rng or make_rng()
    length = hash_spec.digest_length

    if not isinstance(basis, AccessStructureBasis):
        raise AccessStructureError("setup needs an AccessStructureBasis")
    if fixed_secret is not None and len(fixed_secret) != length:
        raise SecretLengthError(f"secret is {len(fixed_secret)} bytes, expected {length}")
    if version > MAX_VERSION:
        raise VersionOverflowError(f"version {version} exceeds {MAX_VERSION}")

    shares = tuple(Share(p, rng.token_bytes(length)) for p in range(1, basis.n + 1))
    if scheme_id is None:
        scheme_id = rng.token_bytes(16).hex()

    digests = _subset_digests(shares, basis, hash_spec, workers)

    if fixed_secret is None:
        secret = digests[0]
        logger.warning(
            f"⚠️ No fixed secret: using h_1 of {{{subset_key(basis.minimal_subsets[0])}}}, "
            "its public control value is all zeros"
        )
    else:
        secret = bytes(fixed_secret)

    entries = {}
    for subset, h_i in zip(basis, digests):
        key = subset_key(subset)
        entries[key] = ControlEntry(key, xor_bytes(h_i, secret))

    commitments = commit_shares(shares, hash_spec) if verifiable else None
    public = PublicControlArea(
        version=version,
        hash_spec=hash_spec,
        basis=basis,
        entries=entries,
        commitments=commitments,
        scheme_id=scheme_id,
    )
    logger.info(
        f"✅ Setup v{version}: n={basis.n}, w={len(entries)}, hash={hash_spec.label}, "
        f"verifiable={verifiable}"
    )
    return DealerOutput(shares=shares, public=public, secret=SecretDigest(secret))


def recover(
    shares_of_subset: Iterable[Share], subset: Sequence[int], public: PublicControlArea
) -> SecretDigest:
    """h = H(M_priv) XOR c for an exact minimal authorized subset."""
    members = canonical_subset(subset, public.n)
    control = public.control_value(members)

    shares = list(shares_of_subset)
    for share in shares:
        _check_share_length(share, public.hash_spec.digest_length)
    message = private_message(shares, members)
    return SecretDigest(xor_bytes(public.hash_spec.digest(message), control))


def refresh(
    public: PublicControlArea,
    recovering_shares: Iterable[Share],
    recovering_subset: Sequence[int],
    rng: Optional[RandomSource] = None,
    workers: int = SETUP_WORKERS,
) -> DealerOutput:
    """Recover h with one basis element, then re-deal fresh shares for the same h."""
    if public.version >= MAX_VERSION:
        raise VersionOverflowError(f"control area already at version {public.version}")

    secret = recover(recovering_shares, recovering_subset, public)
    output = setup(
        public.basis,
        public.hash_spec,
        fixed_secret=secret.value,
        rng=rng,
        verifiable=public.commitments is not None,
        workers=workers,
        version=public.version + 1,
        scheme_id=public.scheme_id,
    )
    logger.info(f"🔄 Refreshed shares: v{public.version} -> v{output.public.version}")
    return output


def commitment(share_value: bytes, hash_spec: HashSpec) -> bytes:
    return hash_spec.digest(COMMITMENT_PREFIX + share_value)


def commit_shares(shares: Iterable[Share], hash_spec: HashSpec) -> Dict[int, bytes]:
    """g_i = G(0x02 || s_i) per participant."""
    result = {}
    for share in sorted(shares, key=lambda s: s.participant):
        _check_share_length(share, hash_spec.digest_length)
        if share.participant in result:
            raise ShareError(f"duplicate share for participant {share.participant}")
        result[share.participant] = commitment(share.value, hash_spec)
    return result


def verify_share(share: Share, public: PublicControlArea) -> bool:
    if public.commitments is None:
        raise CommitmentsMissingError("control area carries no share commitments")
    expected = public.commitments.get(share.participant)
    if expected is None:
        raise CommitmentsMissingError(f"no commitment for participant {share.participant}")
    if len(share.value) != public.hash_spec.digest_length:
        return False
    return commitment(share.value, public.hash_spec) == expected


def verify_returned_shares(shares: Iterable[Share], public: PublicControlArea) -> List[int]:
    """Dealer-side check of returned shares; lists participants that fail."""
    failed = [s.participant for s in shares if not verify_share(s, public)]
    if failed:
        logger.warning(f"⚠️ Shares failed commitment check: {failed}")
    return failed
