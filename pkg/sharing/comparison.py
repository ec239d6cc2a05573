"""
Side-by-side report of the hash scheme and the Shamir baseline over the
same (t+1, n) threshold structure. Structural comparison only: each
scheme recovers its own secret.
"""

import time

import pandas as pd

from utils.logging_helper import get_module_logger
from utils.rng import make_rng

from . import hss, shamir
from .access_structures import threshold_basis

logger = get_module_logger(__name__)

# 2^61 - 1, a Mersenne prime
DEFAULT_Q = 2**61 - 1


def compare_schemes(t_plus_1: int, n: int, seed=None, q: int = DEFAULT_Q, hash_spec=None) -> pd.DataFrame:
    rng = make_rng(seed)
    hash_spec = hash_spec or hss.HashSpec()
    basis = threshold_basis(t_plus_1, n)

    started = time.perf_counter()
    dealt = hss.setup(basis, hash_spec, rng=rng)
    hash_setup = time.perf_counter() - started

    by_id = {s.participant: s for s in dealt.shares}
    started = time.perf_counter()
    hash_ok = all(
        hss.recover([by_id[p] for p in subset], subset, dealt.public) == dealt.secret
        for subset in basis
    )
    hash_recover = (time.perf_counter() - started) / len(basis)

    field = shamir.PrimeField(q)
    secret = rng.randbelow(q)
    started = time.perf_counter()
    _, points = shamir.shamir_split(secret, t_plus_1 - 1, n, field, rng)
    shamir_setup = time.perf_counter() - started

    point_by_x = {pt.x: pt for pt in points}
    started = time.perf_counter()
    shamir_ok = all(
        shamir.shamir_recover([point_by_x[p] for p in subset], field, t_plus_1 - 1) == secret
        for subset in basis
    )
    shamir_recover = (time.perf_counter() - started) / len(basis)

    field_bytes = (q.bit_length() + 7) // 8
    df = pd.DataFrame([
        {
            "scheme": f"hash ({hash_spec.label})",
            "shares": len(dealt.shares),
            "share_bytes": hash_spec.digest_length,
            "secret_bytes": len(dealt.secret.value),
            "public_bytes": dealt.public.w * hash_spec.digest_length,
            "setup_s": hash_setup,
            "recover_s": hash_recover,
            "all_subsets_recover": hash_ok,
        },
        {
            "scheme": f"shamir (q={q})",
            "shares": len(points),
            "share_bytes": field_bytes,
            "secret_bytes": field_bytes,
            "public_bytes": 0,
            "setup_s": shamir_setup,
            "recover_s": shamir_recover,
            "all_subsets_recover": shamir_ok,
        },
    ])
    logger.info(f"Compared schemes for ({t_plus_1}, {n}): hash_ok={hash_ok}, shamir_ok={shamir_ok}")
    return df
