"""Search strategies that locate a 4k with a three-term ceiling expansion of p/4k.

Each strategy yields a :class:`SolutionRecord` whose triple has been verified
exactly. Strategies, cheapest first:

grid  congruence grid: p = -c (mod c1*c2 - 1) for c1, c2 = 3 (mod 4)
f1    a divisor d = 3 (mod 4) of p + 1, giving 4k = p + d
f2    consecutive sources i >= 2: d | p + i, d = 3 (mod 4), 4i | p + d
f0    the remaining (dispersed) values of ceil(p / 4k), same test as f2
fx    factors f of (p + c2) / 4 with c2 = 4k_i + 3 and c2 | 4f + 1
"""

import math
import time
from dataclasses import dataclass, field, replace

from .cf_core import three_term_check
from .factorization import (
    CODIVISOR_BOUND,
    DEFAULT_FACTOR_LIMIT,
    DivisorOverflow,
    divisors_from,
    small_divisors,
    factor_bounded,
    is_probable_prime,
)

DEFAULT_DEPTH = 96
DEFAULT_GRID_SIZE = 1026
DEFAULT_FX_MAX_K = 8

KINDS = ("grid", "f1", "f2", "f0", "fx")


class InconsistencyError(RuntimeError):
    """A constructed solution failed exact verification. Must never happen."""


@dataclass(frozen=True)
class SourceLabel:
    kind: str
    index: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}")
        if self.index == 0 and self.kind not in ("grid", "f1", "fx"):
            raise ValueError(f"{self.kind} needs a source index")

    def __str__(self):
        return f"{self.kind}.{self.index}"


@dataclass(frozen=True)
class EgyptianTriple:
    p: int
    fourk: int
    x: int
    y: int
    z: int

    @property
    def k(self):
        return self.fourk // 4

    def verify(self):
        x, y, z = self.x, self.y, self.z
        return 4 * x * y * z == self.p * (y * z + x * z + x * y)


@dataclass(frozen=True)
class SolutionRecord:
    p: int
    source: SourceLabel = None
    witness_divisor: int = 0
    fourk: int = 0
    coefficients: tuple = ()
    triple: EgyptianTriple = None
    used_cofactor: bool = False
    micros: int = 0
    depth: int = 0

    @property
    def failed(self):
        return self.source is None

    @property
    def strategy(self):
        return "FAILURE" if self.failed else self.source.kind

    @property
    def elapsed(self):
        """Wall time in seconds."""
        return self.micros / 1e6


@dataclass(frozen=True)
class SolverConfig:
    depth: int = DEFAULT_DEPTH
    factor_limit: int = DEFAULT_FACTOR_LIMIT
    grid_size: int = DEFAULT_GRID_SIZE
    fx_max_k: int = DEFAULT_FX_MAX_K
    codivisor_bound: int = CODIVISOR_BOUND


def _triple(p, fourk, coefficients):
    c0, c1, _ = coefficients
    p0, p1 = c0, c0 * c1 - 1
    k = fourk // 4
    x, y, z = sorted((k * p0, k * p0 * p1, k * p1 * p))
    triple = EgyptianTriple(p, fourk, x, y, z)
    if not triple.verify():
        raise InconsistencyError(f"triple for p={p}, 4k={fourk} does not verify")
    return triple


def construct_triple(p, fourk):
    """Scale the sum-by-pairs denominators of p/fourk by k = fourk/4.

    With convergent numerators (p0, p1, p) the triple is k*p0, k*p0*p1 and
    k*p1*p, returned sorted and checked exactly.
    """
    if fourk % 4:
        raise ValueError(f"4k = {fourk} is not a multiple of 4")
    coefficients = three_term_check(p, fourk)
    if coefficients is None:
        raise ValueError(f"{p}/{fourk} does not expand to three terms")
    return _triple(p, fourk, coefficients)


def _record(p, source, witness, fourk, used_cofactor=False, depth=0, coefficients=None):
    if coefficients is None:
        coefficients = three_term_check(p, fourk)
    if fourk > 2 * p + coefficients[2]:
        raise InconsistencyError(f"4k = {fourk} lies beyond the orbit of {p}")
    return SolutionRecord(
        p=p,
        source=source,
        witness_divisor=witness,
        fourk=fourk,
        coefficients=coefficients,
        triple=_triple(p, fourk, coefficients),
        used_cofactor=used_cofactor,
        depth=depth,
    )


# -- congruence grid --------------------------------------------------------


@dataclass(frozen=True)
class GridEntry:
    m: int
    residues: frozenset
    witness: tuple


@dataclass(frozen=True)
class CongruenceGrid:
    entries: tuple
    size_limit: int
    # (m, residue, c) triples in scan order, residue = -c mod m
    _scan: tuple = field(default=(), repr=False, compare=False)

    def __len__(self):
        return len(self.entries)


def _pairs_below(bound):
    pairs = []
    c1 = 3
    while c1 * c1 - 1 <= bound:
        c2 = c1
        while c1 * c2 - 1 <= bound:
            pairs.append((c1 * c2 - 1, c1, c2))
            c2 += 4
        c1 += 4
    pairs.sort()
    return pairs


def build_grid(size_limit=DEFAULT_GRID_SIZE):
    """First ``size_limit`` pairs c1 <= c2, both 3 (mod 4), ordered by m = c1*c2 - 1."""
    if size_limit < 1:
        raise ValueError("grid needs at least one pair")
    bound = 64
    pairs = _pairs_below(bound)
    while len(pairs) < size_limit:
        bound *= 2
        pairs = _pairs_below(bound)
    # every pair with m <= bound is present, so the first size_limit are final
    entries, scan, seen = [], [], set()
    for m, c1, c2 in pairs[:size_limit]:
        residues = []
        for c in (c1, c2):
            r = -c % m
            if (m, r) not in seen:
                seen.add((m, r))
                residues.append(r)
                scan.append((m, r, c))
        if residues:
            entries.append(GridEntry(m, frozenset(residues), (c1, c2)))
    return CongruenceGrid(tuple(entries), size_limit, tuple(scan))


def grid_lookup(p, grid):
    """First grid entry whose residues contain p mod m; 4k = m.

    For p = -c (mod m) with m = c*c' - 1 the expansion of p/m is
    [(p + c)/m, c', c], so no expansion is needed on a hit.
    """
    for m, r, c in grid._scan:
        if p % m == r:
            coefficients = ((p + c) // m, (m + 1) // c, c)
            return _record(p, SourceLabel("grid", m), c, m, coefficients=coefficients)
    return None


# -- divisor sources -------------------------------------------------------


def witness_divisors(n, limit=DEFAULT_FACTOR_LIMIT, bound=CODIVISOR_BOUND):
    """Divisors d = 3 (mod 4) of n with co-divisor n/d <= bound, largest first.

    Candidates are generated from the small co-divisor e = n/d, built out of
    the primes found below the factor limit, so any unfactored cofactor of n
    is carried inside d. Returns ``(divisors, cofactor)``.
    """
    pf = factor_bounded(n, limit)
    divs = [n // e for e in small_divisors(pf, bound)]
    return [d for d in divs if d % 4 == 3], pf.cofactor


def _try_source(p, i, limit, bound, kind, depth):
    divs, cofactor = witness_divisors(p + i, limit, bound)
    step = 4 * i
    for d in divs:
        if (p + d) % step:
            continue
        fourk = (p + d) // i
        if three_term_check(p, fourk) is None:
            continue
        return _record(p, SourceLabel(kind, i), d, fourk, cofactor > 1, depth)
    return None


def solve_f1(p, limit=DEFAULT_FACTOR_LIMIT, bound=CODIVISOR_BOUND):
    """A divisor d = 3 (mod 4) of p + 1 gives 4k = p + d."""
    return _try_source(p, 1, limit, bound, "f1", 1)


def f2_span(p, max_depth):
    """Last consecutive source index scanned by f2."""
    return min(max_depth, math.isqrt(p) // 2)


def solve_f2(p, max_depth=DEFAULT_DEPTH, limit=DEFAULT_FACTOR_LIMIT, bound=CODIVISOR_BOUND):
    for i in range(2, f2_span(p, max_depth) + 1):
        rec = _try_source(p, i, limit, bound, "f2", i)
        if rec is not None:
            return rec
    return None


def distinct_sources(p):
    """Distinct values of ceil(p / 4k) for 4 <= 4k <= 2p, ascending.

    >>> list(distinct_sources(73))
    [1, 2, 3, 4, 5, 7, 10, 19]
    """
    q = (p - 1) // 4
    if p // 2 > q:
        yield 1
    j = q
    while j > 0:
        t = q // j
        yield t + 1
        j = q // (t + 1)


def solve_f0(p, max_sources=DEFAULT_DEPTH, limit=DEFAULT_FACTOR_LIMIT,
             bound=CODIVISOR_BOUND, covered=None):
    """Sources past the consecutive range, at most ``max_sources`` of them.

    ``covered`` is the last index already handled by f1/f2 and defaults to the
    full f2 range ``isqrt(p) // 2``.
    """
    if covered is None:
        covered = max(1, math.isqrt(p) // 2)
    used = 0
    for i in distinct_sources(p):
        if i <= covered:
            continue
        if used >= max_sources:
            break
        used += 1
        rec = _try_source(p, i, limit, bound, "f0", covered + used)
        if rec is not None:
            return rec
    return None


def solve_fx(p, max_k=DEFAULT_FX_MAX_K, limit=DEFAULT_FACTOR_LIMIT, depth_offset=0):
    """Factors f of (p + c2)/4, c2 = 4k_i + 3, accepted after full expansion."""
    for k_i in range(max_k + 1):
        c2 = 4 * k_i + 3
        pf = factor_bounded((p + c2) // 4, limit)
        try:
            fs = divisors_from(pf)
        except DivisorOverflow:
            continue
        for f in fs:
            if (4 * f + 1) % c2:
                continue
            coefficients = three_term_check(p, 4 * f)
            if coefficients is None or coefficients[2] != c2:
                continue
            used = pf.cofactor > 1 and f % pf.cofactor == 0
            return _record(p, SourceLabel("fx", k_i), f, 4 * f, used, depth_offset + k_i + 1)
    return None


def check_candidate(p):
    if p % 4 != 1:
        raise ValueError(f"{p} is not 1 mod 4")
    if not is_probable_prime(p):
        raise ValueError(f"{p} is not prime")


def solve(p, config=SolverConfig(), grid=None, checked=False):
    """Run grid, f1, f2, f0 and fx in turn; the first success wins.

    f1, f2 and f0 share one budget of ``config.depth`` sources; fx runs after
    them and only when that budget is positive. A total miss returns a record
    with ``source=None``.
    """
    if not checked:
        check_candidate(p)
    start = time.perf_counter_ns()
    rec = None
    depth = config.depth
    limit, bound = config.factor_limit, config.codivisor_bound
    if grid is not None and config.grid_size > 0:
        rec = grid_lookup(p, grid)
    if rec is None and depth >= 1:
        rec = solve_f1(p, limit, bound)
        top = max(f2_span(p, depth), 1)
        if rec is None:
            rec = solve_f2(p, depth, limit, bound)
        if rec is None and depth > top:
            rec = solve_f0(p, depth - top, limit, bound, covered=top)
        if rec is None:
            rec = solve_fx(p, config.fx_max_k, limit, depth_offset=depth)
    micros = (time.perf_counter_ns() - start) // 1000
    if rec is None:
        return SolutionRecord(p=p, micros=micros, depth=depth)
    return replace(rec, micros=micros)
