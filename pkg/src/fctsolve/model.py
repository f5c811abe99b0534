"""Heuristic failure-probability model for the source search.

Floating point throughout; every power is evaluated as exp(log(...)) so that
magnitudes like p ~ 10**4000 neither overflow nor underflow in between.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

LANDAU_RAMANUJAN = 0.76422365358922
LN2 = math.log(2.0)


@dataclass(frozen=True)
class ModelParams:
    landau_ramanujan_K: float = LANDAU_RAMANUJAN
    usable_divisor_fraction: float = 1.0 / 3.0
    orbit_constant: float = 2.0

    def __post_init__(self):
        if self.landau_ramanujan_K < 0 or self.orbit_constant <= 0:
            raise ValueError("model constants must be positive")
        if not 0 < self.usable_divisor_fraction < 1:
            raise ValueError("usable divisor fraction must lie in (0, 1)")


DEFAULT_PARAMS = ModelParams()


class Flagged(float):
    """A float carrying whether it was computed inside the model's regime."""

    in_regime = True

    def __new__(cls, value, in_regime=True):
        obj = super().__new__(cls, value)
        obj.in_regime = in_regime
        return obj


def _exp(x):
    # exp that saturates instead of raising
    if x > 709.0:
        return math.inf
    return math.exp(x)


def p_f1(ln_p, params=DEFAULT_PARAMS):
    """Probability that p + 1 has no divisor = 3 (mod 4): K / sqrt(ln p)."""
    return params.landau_ramanujan_K / math.sqrt(ln_p)


def log_p_f2_truncated(depth_M, ln_N, params=DEFAULT_PARAMS):
    return -params.usable_divisor_fraction * ln_N * math.log(depth_M)


def p_f2_truncated(depth_M, ln_N, params=DEFAULT_PARAMS):
    """(1/M) ** (fraction * ln N): consecutive sources cut off at depth M."""
    return _exp(log_p_f2_truncated(depth_M, ln_N, params))


def log_p_f2_full(ln_p, params=DEFAULT_PARAMS):
    return params.usable_divisor_fraction * ln_p * (LN2 - ln_p / 2)


def p_f2_full(ln_p, params=DEFAULT_PARAMS):
    """(2/sqrt(p)) ** (fraction * ln p): all consecutive sources up to sqrt(p)/2."""
    return _exp(log_p_f2_full(ln_p, params))


def log_p_f0(depth_M, ln_p, params=DEFAULT_PARAMS):
    if depth_M == 0:
        return 0.0
    log_ratio = math.log(depth_M) - ln_p  # log(M/p)
    if log_ratio >= 0:
        raise ValueError("need M < p")
    return depth_M * params.usable_divisor_fraction * ln_p * math.log1p(-math.exp(log_ratio))


def p_f0(depth_M, ln_p, params=DEFAULT_PARAMS):
    """((p - M)/p) ** (M * fraction * ln p) for the dispersed sources."""
    return _exp(log_p_f0(depth_M, ln_p, params))


def regime_ok(ln_p):
    """The simplification to (ln p)^2/12 needs 1 - 2 ln2 / ln p > 1/2."""
    return ln_p > 4 * LN2


def expected_failures(sample_N, ln_p):
    """N exp(-(ln p)^2 / 12), flagged when p is too small for the bound."""
    if sample_N <= 0:
        raise ValueError("sample size must be positive")
    return Flagged(_exp(log_expected_failures(sample_N, ln_p)), regime_ok(ln_p))


def log_expected_failures(sample_N, ln_p):
    return math.log(sample_N) - ln_p * ln_p / 12


def expected_failures_truncated(sample_N, ln_p, depth_M, params=DEFAULT_PARAMS):
    """N (1/M) ** (fraction * ln p), the search cut off after M sources."""
    return sample_N * p_f2_truncated(depth_M, ln_p, params)


def failure_exponent(ln_p, form="paper"):
    """Exponent of the per-prime failure bound.

    ``paper`` is -(ln p)^2/12; ``sharp`` is the form before simplification,
    -(ln p)^2/6 + (ln 2/3) ln p.
    """
    if form == "paper":
        return -ln_p * ln_p / 12
    if form == "sharp":
        return -ln_p * ln_p / 6 + LN2 / 3 * ln_p
    raise ValueError(f"unknown form {form!r}")


@dataclass(frozen=True)
class FailureEstimate:
    p_magnitude: float
    sample_size: float
    depth: int
    components: tuple
    total: float
    expected_failures: float


def estimate(ln_p, sample_N, depth_M, params=DEFAULT_PARAMS):
    """All three component probabilities at one (p, N, M) point.

    ``total`` is their product (independent sources); the expectation uses
    the truncated f2 bound, which is the one the search actually honours.
    """
    f1 = p_f1(ln_p, params)
    f2 = p_f2_truncated(depth_M, ln_p, params)
    f0 = p_f0(depth_M, ln_p, params)
    return FailureEstimate(
        p_magnitude=ln_p,
        sample_size=sample_N,
        depth=depth_M,
        components=(f1, f2, f0),
        total=min(1.0, f1) * f2 * f0,
        expected_failures=sample_N * f2,
    )


# -- comparison with Vaughan's bound ----------------------------------------

LOGS = {"ln": math.log, "log10": math.log10, "log2": math.log2}


def vaughan_bound(sample_N, c=1.0, log=math.log):
    """N exp(-(log N)^(2/3) / c)."""
    if sample_N <= 1 or c <= 0:
        raise ValueError("need N > 1 and c > 0")
    return sample_N * _exp(-log(sample_N) ** (2.0 / 3.0) / c)


def vaughan_linear(sample_N, range_value, c=1.0):
    """N exp(-(2/3) ln(range) / c), i.e. N * range^(-2/3) for c = 1.

    The reading of the Vaughan column that matches every printed value.
    """
    return sample_N * _exp(-(2.0 / 3.0) * math.log(range_value) / c)


def vaughan_sweep(sample_N, range_value, c=1.0):
    """Every (log base, argument) reading of the Vaughan formula.

    Keys are (base, argument): ``argument`` says whether the sample size or
    the range magnitude goes inside the logarithm. The leading factor is
    always the sample size. ``("linear", "range")`` is :func:`vaughan_linear`.
    """
    out = {}
    for name, log in LOGS.items():
        for arg, value in (("sample", sample_N), ("range", range_value)):
            out[(name, arg)] = sample_N * _exp(-log(value) ** (2.0 / 3.0) / c)
    out[("linear", "range")] = vaughan_linear(sample_N, range_value, c)
    return out


def best_vaughan_reading(rows=None, c=1.0):
    """The sweep entry with the smallest worst-case log10 error over Table 1."""
    rows = rows or PAPER_TABLE1
    errors = {}
    for row in rows:
        sweep = vaughan_sweep(10.0 ** row.sample_exp, 10.0 ** row.range_exp, c)
        for key, value in sweep.items():
            err = abs(math.log10(value) - math.log10(row.vaughan)) if value > 0 else math.inf
            errors[key] = max(errors.get(key, 0.0), err)
    key = min(errors, key=errors.get)
    return key, errors


# -- Table 1 -----------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    depth: int
    range_exp: int
    sample_exp: int
    fct: float = math.nan
    vaughan: float = math.nan


PAPER_TABLE1 = (
    TableRow(20, 17, 7, 1.1e-10, 4.64e-5),
    TableRow(20, 17, 17, 1.0, 4.64e5),
    TableRow(40, 17, 17, 1.2e-4, 4.64e5),
    TableRow(20, 52, 7, 8.27e-45, 2.15e-28),
    TableRow(20, 52, 52, 1.18, 2.15e17),
    TableRow(40, 52, 52, 1.2e-12, 2.15e17),
)


@dataclass(frozen=True)
class ComparedRow:
    depth: int
    range_exp: int
    sample_exp: int
    fct: float
    vaughan: float
    vaughan_literal: float
    paper_fct: float
    paper_vaughan: float

    @property
    def fct_rel_error(self):
        return abs(self.fct - self.paper_fct) / self.paper_fct


def table_compare(rows=PAPER_TABLE1, params=DEFAULT_PARAMS):
    """Model columns for each (M, range exponent, sample exponent) row.

    ``fct`` is N (1/M)^(ln p / 3); ``vaughan`` uses the linear reading and
    ``vaughan_literal`` evaluates the formula as written with ln and N = sample.
    """
    out = []
    for row in rows:
        if not isinstance(row, TableRow):
            row = TableRow(*row)
        ln_p = row.range_exp * math.log(10)
        n = 10.0 ** row.sample_exp
        out.append(ComparedRow(
            depth=row.depth,
            range_exp=row.range_exp,
            sample_exp=row.sample_exp,
            fct=expected_failures_truncated(n, ln_p, row.depth, params),
            vaughan=vaughan_linear(n, 10.0 ** row.range_exp),
            vaughan_literal=vaughan_bound(n),
            paper_fct=row.fct,
            paper_vaughan=row.vaughan,
        ))
    return out


# -- Borel-Cantelli partial sums ---------------------------------------------

EXACT_PRIME_BOUND = 10**8


def _prime_array(n):
    """Primes <= n as a float64 array (odd-only numpy sieve)."""
    if n < 2:
        return np.array([], dtype=np.float64)
    sieve = np.ones((n - 1) // 2 + 1, dtype=bool)  # index j -> 2j + 1
    sieve[0] = False
    for j in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if sieve[j]:
            q = 2 * j + 1
            sieve[(q * q - 1) // 2::q] = False
    odd = 2 * np.nonzero(sieve)[0] + 1
    return np.concatenate(([2.0], odd.astype(np.float64)))


def borel_cantelli_partial_sum(x_max, step_mode="paper"):
    """Sum over primes p <= x_max of exp(failure_exponent(ln p)).

    Primes are enumerated exactly up to 10**8; beyond that the prime density
    1/ln t is integrated instead.
    """
    if x_max < 100:
        raise ValueError("x_max must be at least 100")
    exact_top = int(min(x_max, EXACT_PRIME_BOUND))
    logs = np.log(_prime_array(exact_top))
    if step_mode == "paper":
        terms = np.exp(-logs * logs / 12)
    else:
        terms = np.exp(-logs * logs / 6 + LN2 / 3 * logs)
    total = float(np.sum(terms))
    if x_max > EXACT_PRIME_BOUND:
        # dt/ln t with t = e^u
        tail, _ = integrate.quad(
            lambda u: math.exp(u + failure_exponent(u, step_mode)) / u,
            math.log(EXACT_PRIME_BOUND), math.log(x_max),
        )
        total += tail
    return total


def crossover_ln_p():
    """ln p beyond which p^(-ln p / 12) < p^(-2), i.e. ln p > 24."""
    return 24.0
