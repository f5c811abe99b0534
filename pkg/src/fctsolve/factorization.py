"""Bounded factorization of shifted integers and divisor enumeration.

``factor_bounded`` extracts every prime factor up to a limit and leaves the
rest as an unfactored cofactor. Primes below 2**16 are removed by trial
division; primes in (2**16, limit] are isolated with gcds against block
products of all such primes and split with Pollard rho, so the cofactor is
guaranteed free of prime factors <= limit.
"""

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import compress

import gmpy2

DEFAULT_FACTOR_LIMIT = 1 << 24
TRIAL_BOUND = 1 << 16
DIVISOR_CAP = 1 << 20
CODIVISOR_BOUND = TRIAL_BOUND

# Deterministic Miller-Rabin for n < 3317044064679887385961981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981
_MR_RANDOM_ROUNDS = 64


class DivisorOverflow(RuntimeError):
    """The divisor list of a source would exceed the configured cap."""


def primes_up_to(n):
    """Sieve of Eratosthenes, returned as a list."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytes(len(range(i * i, n + 1, i)))
    return list(compress(range(n + 1), sieve))


SMALL_PRIMES = tuple(primes_up_to(TRIAL_BOUND))


def _product(values):
    values = [gmpy2.mpz(v) for v in values]
    if not values:
        return gmpy2.mpz(1)
    while len(values) > 1:
        paired = [a * b for a, b in zip(values[::2], values[1::2])]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


@lru_cache(maxsize=4)
def _large_prime_blocks(limit, block=4096):
    """Products of consecutive runs of the primes in (TRIAL_BOUND, limit]."""
    primes = [p for p in primes_up_to(limit) if p > TRIAL_BOUND]
    return tuple(_product(primes[i:i + block]) for i in range(0, len(primes), block))


def _large_prime_part(m, limit):
    """Product of the distinct primes in (TRIAL_BOUND, limit] dividing m."""
    g = gmpy2.mpz(1)
    m = gmpy2.mpz(m)
    for block in _large_prime_blocks(limit):
        h = gmpy2.gcd(block, m)
        if h > 1:
            g *= h
    return int(g)


def is_probable_prime(n, rng=None):
    """Miller-Rabin; deterministic below about 3.3e24, 64 random rounds above.

    ``rng`` supplies the random bases for large n (a seeded ``random.Random``
    keeps runs reproducible).
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < _MR_DETERMINISTIC_BOUND:
        bases = _MR_BASES
    else:
        rng = rng or random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(_MR_RANDOM_ROUNDS)]
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_rho(n):
    """A nontrivial factor of the odd composite n (Brent's variant)."""
    if n % 2 == 0:
        return 2
    n = gmpy2.mpz(n)
    for c in range(1, 1000):
        y, r, q, g = gmpy2.mpz(2), 1, gmpy2.mpz(1), gmpy2.mpz(1)
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gmpy2.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = gmpy2.mpz(1)
            while g == 1:
                ys = (ys * ys + c) % n
                g = gmpy2.gcd(abs(x - ys), n)
        if g != n:
            return int(g)
    raise ArithmeticError(f"pollard rho failed on {n}")


def _split_squarefree(g):
    """Prime factors of a squarefree product of primes (no small ones)."""
    stack, out = [g], []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out.append(m)
            continue
        f = pollard_rho(m)
        stack.extend((f, m // f))
    return out


@dataclass(frozen=True)
class PartialFactorization:
    n: int
    prime_powers: tuple
    cofactor: int = 1
    limit: int = DEFAULT_FACTOR_LIMIT

    @property
    def smooth_part(self):
        out = 1
        for p, e in self.prime_powers:
            out *= p ** e
        return out

    @property
    def complete(self):
        return self.cofactor == 1


def factor_bounded(n, limit=DEFAULT_FACTOR_LIMIT):
    """All prime factors of n up to ``limit`` plus the unfactored cofactor.

    >>> factor_bounded(120).prime_powers
    ((2, 3), (3, 1), (5, 1))
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    if limit < 2:
        raise ValueError(f"factor limit must be at least 2, got {limit}")
    found = {}
    m = n
    m_is_prime = False
    for p in SMALL_PRIMES:
        if p > limit:
            break
        if p * p > m:
            m_is_prime = m > 1
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
    else:
        # nothing below TRIAL_BOUND divides m
        if m < TRIAL_BOUND * TRIAL_BOUND:
            m_is_prime = m > 1
        elif limit > TRIAL_BOUND:
            g = _large_prime_part(m, limit)
            for p in _split_squarefree(g):
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                found[p] = e
            m_is_prime = 1 < m < TRIAL_BOUND * TRIAL_BOUND
    if m_is_prime and m <= limit:
        found[m] = found.get(m, 0) + 1
        m = 1
    return PartialFactorization(n, tuple(sorted(found.items())), m, limit)


def small_divisors(pf, bound):
    """Divisors of the smooth part of ``pf`` that are <= bound, ascending."""
    divs = [1]
    for p, e in pf.prime_powers:
        grown = []
        for d in divs:
            for _ in range(e + 1):
                if d > bound:
                    break
                grown.append(d)
                d *= p
        divs = grown
    return sorted(divs)


def divisors_from(pf, residue_filter=None, cap=DIVISOR_CAP):
    """Divisors of n built from the found primes, ascending.

    The cofactor is treated as a single prime-like factor: every divisor of the
    smooth part also appears multiplied by it. ``residue_filter`` is an optional
    ``(modulus, residue)`` pair.
    """
    count = 1
    for _, e in pf.prime_powers:
        count *= e + 1
    if pf.cofactor > 1:
        count *= 2
    if count > cap:
        raise DivisorOverflow(f"{pf.n} has {count} divisors, cap is {cap}")
    divs = [1]
    for p, e in pf.prime_powers:
        divs = [d * p ** j for d in divs for j in range(e + 1)]
    if pf.cofactor > 1:
        divs += [d * pf.cofactor for d in divs]
    if residue_filter is not None:
        modulus, residue = residue_filter
        divs = [d for d in divs if d % modulus == residue]
    return sorted(divs)
