"""
Arithmetic over F_p.

Holds the prime, the scalar type and the generalized binomial coefficient
that every Adem-type sum in the package is built from, plus helpers for
formal linear combinations stored as ``{key: residue}`` dictionaries.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Hashable, Iterable, Mapping, Tuple, TypeVar, Union

from sympy import isprime, mod_inverse

from src.algebra.errors import MixedPrimeError, UnsupportedPrimeError
from src.utils.config import get_settings

K = TypeVar("K", bound=Hashable)
Combination = Dict[K, int]


@dataclass(frozen=True)
class Prime:
    """A prime within the configured bound."""
    p: int

    def __post_init__(self):
        check_prime(self.p)

    def __int__(self) -> int:
        return self.p

    @property
    def is_two(self) -> bool:
        return self.p == 2


@lru_cache(maxsize=None)
def _prime_ok(p: int, bound: int) -> bool:
    return isinstance(p, int) and p >= 2 and p <= bound and isprime(p)


def check_prime(p: int) -> int:
    """Return p unchanged, raising UnsupportedPrimeError if it is unusable."""
    bound = get_settings().max_prime
    if not _prime_ok(p, bound):
        raise UnsupportedPrimeError(
            f"p={p} is not a prime in [2, {bound}] (PARTITION_OPS_MAX_PRIME)")
    return p


def as_int_prime(p: Union[int, Prime]) -> int:
    return p.p if isinstance(p, Prime) else check_prime(p)


@dataclass(frozen=True)
class FpScalar:
    """
    An element of F_p, always stored reduced.

    Example:
        >>> FpScalar(3, 5) + FpScalar(3, 2)
        FpScalar(p=3, value=1)
    """
    p: int
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> "FpScalar":
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise MixedPrimeError(f"cannot combine F_{self.p} with F_{other.p}")
            return other
        if isinstance(other, int):
            return FpScalar(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return FpScalar(self.p, self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FpScalar(self.p, self.value - other.value)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return FpScalar(self.p, self.value * other.value)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(self.p, -self.value)

    def __pow__(self, exponent: int):
        return FpScalar(self.p, pow(self.value, exponent, self.p))

    def inverse(self) -> "FpScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpScalar(self.p, int(mod_inverse(self.value, self.p)))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.p
        if isinstance(other, FpScalar):
            return self.p == other.p and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.value))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0


@lru_cache(maxsize=1 << 18)
def binom_mod(n: int, k: int, p: int) -> int:
    """
    Binomial coefficient n choose k reduced mod p, as a plain int.

    Negative n uses the falling factorial n(n-1)...(n-k+1)/k!, i.e.
    binom(n, k) = (-1)^k binom(k - n - 1, k).
    """
    if k < 0:
        return 0
    if n < 0:
        sign = -1 if k % 2 else 1
        return (sign * binom_mod(k - n - 1, k, p)) % p
    if k > n:
        return 0
    # Lucas
    result = 1
    while n or k:
        n_digit, k_digit = n % p, k % p
        if k_digit > n_digit:
            return 0
        result = (result * math.comb(n_digit, k_digit)) % p
        n //= p
        k //= p
    return result


def binom_mod_p(n: int, k: int, p: Union[int, Prime]) -> FpScalar:
    """binom_mod wrapped as an FpScalar."""
    q = as_int_prime(p)
    return FpScalar(q, binom_mod(n, k, q))


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def fp_linear_combine(terms: Iterable[Tuple[FpScalar, K]]) -> Dict[K, FpScalar]:
    """
    Merge (scalar, key) pairs into ``{key: scalar}``, dropping zeros.

    Raises MixedPrimeError when the scalars do not share one prime.
    """
    merged: Dict[K, FpScalar] = {}
    prime = None
    for scalar, key in terms:
        if prime is None:
            prime = scalar.p
        elif scalar.p != prime:
            raise MixedPrimeError(f"cannot combine F_{prime} with F_{scalar.p}")
        merged[key] = merged[key] + scalar if key in merged else scalar
    return {key: value for key, value in merged.items() if value}


# ---------------------------------------------------------------------------
# int-valued combinations: the fast path used by the rewriting engines
# ---------------------------------------------------------------------------

def accumulate(target: Dict[K, int], key: K, coeff: int, p: int) -> None:
    """target[key] += coeff (mod p), deleting the entry when it becomes 0."""
    value = (target.get(key, 0) + coeff) % p
    if value:
        target[key] = value
    else:
        target.pop(key, None)


def combine(items: Iterable[Tuple[K, int]], p: int) -> Dict[K, int]:
    out: Dict[K, int] = {}
    for key, coeff in items:
        accumulate(out, key, coeff, p)
    return out


def add_scaled(target: Dict[K, int], source: Mapping[K, int], scale: int, p: int) -> None:
    """target += scale * source."""
    scale %= p
    if not scale:
        return
    for key, coeff in source.items():
        accumulate(target, key, coeff * scale, p)


def scale(source: Mapping[K, int], factor: int, p: int) -> Dict[K, int]:
    out: Dict[K, int] = {}
    add_scaled(out, source, factor, p)
    return out


def inverse_mod(value: int, p: int) -> int:
    return int(mod_inverse(value % p, p))
