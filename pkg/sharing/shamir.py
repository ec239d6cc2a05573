"""
Shamir (t+1, n) baseline with proactive share renewal and
Feldman verification. Used as an oracle and comparison target for the
hash scheme. Shares are evaluated at x_i = i.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import gmpy2

from utils.logging_helper import get_module_logger
from utils.rng import RandomSource, make_rng

from .errors import ParameterError

logger = get_module_logger(__name__)


def is_prime(value: int) -> bool:
    # GMP runs BPSW before Miller-Rabin rounds: deterministic below 2^64
    return value >= 2 and bool(gmpy2.is_prime(value, 25))


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ParameterError(f"field modulus {self.q} is not prime")

    def inverse(self, a: int) -> int:
        if a % self.q == 0:
            raise ParameterError("zero has no inverse")
        return int(gmpy2.invert(a, self.q))


@dataclass(frozen=True)
class ShamirShare:
    x: int
    y: int


@dataclass(frozen=True)
class ShamirPolynomial:
    field: PrimeField
    coefficients: Tuple[int, ...]

    def __post_init__(self):
        coefficients = tuple(self.coefficients)
        if not coefficients:
            raise ParameterError("polynomial needs at least the constant term")
        for a in coefficients:
            if a < 0 or a >= self.field.q:
                raise ParameterError(f"coefficient {a} outside [0, {self.field.q})")
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def degree_bound(self) -> int:
        """t: the polynomial has degree at most t."""
        return len(self.coefficients) - 1

    @property
    def secret(self) -> int:
        return self.coefficients[0]

    def evaluate(self, x: int) -> int:
        """Horner's rule mod q."""
        result = 0
        for c in reversed(self.coefficients):
            result = (result * x + c) % self.field.q
        return result

    def shares(self, n: int) -> List[ShamirShare]:
        return [ShamirShare(i, self.evaluate(i)) for i in range(1, n + 1)]

    def __add__(self, other: "ShamirPolynomial") -> "ShamirPolynomial":
        if other.field != self.field:
            raise ParameterError("cannot add polynomials over different fields")
        size = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0,) * (size - len(self.coefficients))
        b = other.coefficients + (0,) * (size - len(other.coefficients))
        return ShamirPolynomial(self.field, tuple((x + y) % self.field.q for x, y in zip(a, b)))


def _check_parameters(t: int, n: int, field: PrimeField) -> None:
    # q > n >= t + 1
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    if not (field.q > n >= t + 1):
        raise ParameterError(f"need q > n >= t+1, got q={field.q}, n={n}, t={t}")


def random_polynomial(
    constant: int, t: int, field: PrimeField, rng: RandomSource
) -> ShamirPolynomial:
    coefficients = (constant,) + tuple(rng.randbelow(field.q) for _ in range(t))
    return ShamirPolynomial(field, coefficients)


def shamir_split(
    secret: int, t: int, n: int, field: PrimeField, rng: Optional[RandomSource] = None
) -> Tuple[ShamirPolynomial, List[ShamirShare]]:
    _check_parameters(t, n, field)
    if secret < 0 or secret >= field.q:
        raise ParameterError(f"secret must lie in [0, {field.q})")

    polynomial = random_polynomial(secret, t, field, rng or make_rng())
    logger.info(f"Split secret over q={field.q} with t={t}, n={n}")
    return polynomial, polynomial.shares(n)


def lagrange_at_zero(shares: Sequence[ShamirShare], field: PrimeField) -> int:
    q = field.q
    result = 0
    for j, share_j in enumerate(shares):
        num = 1
        den = 1
        for m, share_m in enumerate(shares):
            if m == j:
                continue
            num = num * (-share_m.x) % q
            den = den * (share_j.x - share_m.x) % q
        result = (result + share_j.y * num * field.inverse(den)) % q
    return result


def shamir_recover(
    shares: Iterable[ShamirShare], field: PrimeField, t: Optional[int] = None
) -> int:
    """Interpolate a_0 from exactly t+1 shares; `t` defaults to len(shares) - 1."""
    shares = list(shares)
    if not shares:
        raise ParameterError("no shares given")
    if t is not None and len(shares) != t + 1:
        raise ParameterError(f"need exactly t+1={t + 1} shares, got {len(shares)}")

    xs = [s.x % field.q for s in shares]
    if len(set(xs)) != len(xs):
        raise ParameterError(f"duplicate evaluation points {sorted(s.x for s in shares)}")
    if 0 in xs:
        raise ParameterError("share at x = 0 would be the secret itself")
    return lagrange_at_zero(shares, field)


def proactive_renew(
    polynomial: ShamirPolynomial,
    n: int,
    rng: Optional[RandomSource] = None,
    update: Optional[ShamirPolynomial] = None,
) -> Tuple[ShamirPolynomial, List[ShamirShare]]:
    """
    R = P + Q with Q(0) = 0, so R(0) = P(0). New shares R(1)..R(n)
    replace P(1)..P(n).
    """
    t = polynomial.degree_bound
    _check_parameters(t, n, polynomial.field)
    if update is None:
        update = random_polynomial(0, t, polynomial.field, rng or make_rng())
    if update.secret != 0:
        raise ParameterError("renewal polynomial must have b_0 = 0")
    if update.degree_bound > t:
        raise ParameterError(f"renewal polynomial degree exceeds t={t}")

    renewed = polynomial + update
    logger.info(f"🔄 Renewed shares for n={n}, t={t}")
    return renewed, renewed.shares(n)


@dataclass(frozen=True)
class FeldmanParams:
    """p, q prime with q | p-1 and g of order exactly q in Z_p*."""

    p: int
    q: int
    g: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ParameterError(f"p={self.p} is not prime")
        if not is_prime(self.q):
            raise ParameterError(f"q={self.q} is not prime")
        if (self.p - 1) % self.q:
            raise ParameterError(f"q={self.q} does not divide p-1={self.p - 1}")
        if not (1 < self.g < self.p) or pow(self.g, self.q, self.p) != 1:
            raise ParameterError(f"g={self.g} does not have order {self.q} mod {self.p}")

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.q)


def feldman_params_for(q: int) -> FeldmanParams:
    """Smallest prime p = kq + 1 and the first generator of the order-q subgroup."""
    if not is_prime(q):
        raise ParameterError(f"q={q} is not prime")
    k = 2
    while not is_prime(k * q + 1):
        k += 2
    p = k * q + 1
    for h in range(2, p):
        g = pow(h, k, p)
        if g != 1:
            return FeldmanParams(p, q, g)
    raise ParameterError(f"no generator of order {q} mod {p}")


def feldman_commit(polynomial: ShamirPolynomial, params: FeldmanParams) -> Tuple[int, ...]:
    """g^{a_0}, ..., g^{a_t} mod p."""
    if polynomial.field.q != params.q:
        raise ParameterError(f"polynomial over q={polynomial.field.q}, group order is {params.q}")
    return tuple(pow(params.g, a, params.p) for a in polynomial.coefficients)


def feldman_verify(share: ShamirShare, commitments: Sequence[int], params: FeldmanParams) -> bool:
    """g^{P(i)} == prod_j (g^{a_j})^{i^j} mod p, exponents reduced mod q."""
    if share.x < 1:
        raise ParameterError(f"share index must be >= 1, got {share.x}")
    if not commitments:
        raise ParameterError("no commitments given")

    lhs = pow(params.g, share.y % params.q, params.p)
    rhs = 1
    for j, c_j in enumerate(commitments):
        rhs = rhs * pow(c_j, pow(share.x, j, params.q), params.p) % params.p
    return lhs == rhs
