"""Prime generation, batch solving and report aggregation."""

import random
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .factorization import DEFAULT_FACTOR_LIMIT, is_probable_prime
from .strategies import (
    DEFAULT_DEPTH,
    DEFAULT_FX_MAX_K,
    DEFAULT_GRID_SIZE,
    KINDS,
    InconsistencyError,
    SolverConfig,
    build_grid,
    solve,
)

MORDELL_MODULUS = 840
MORDELL_RESIDUES = (1, 121, 169, 289, 361, 529)


def mordell_filter(p):
    return p % MORDELL_MODULUS in MORDELL_RESIDUES


def _wheel(mordell_only):
    if mordell_only:
        return MORDELL_MODULUS, MORDELL_RESIDUES
    return 4, (1,)


def candidate_primes(after, mordell_only=True, rng=None):
    """Primes greater than ``after`` in the filtered classes, ascending."""
    modulus, residues = _wheel(mordell_only)
    base = after - after % modulus
    while True:
        for r in residues:
            n = base + r
            if n > after and n > 1 and is_probable_prime(n, rng):
                yield n
        base += modulus


def next_candidate_prime(after, mordell_only=True, rng=None):
    """Smallest prime > after that is Mordell-type (or 1 mod 4)."""
    return next(candidate_primes(after, mordell_only, rng))


@dataclass(frozen=True)
class BatchConfig:
    range_start: int = 10**6
    count: int = 1000
    depth_M: int = DEFAULT_DEPTH
    factor_limit: int = DEFAULT_FACTOR_LIMIT
    grid_size: int = DEFAULT_GRID_SIZE
    mordell_only: bool = True
    fx_max_k: int = DEFAULT_FX_MAX_K
    worker_count: int = 1
    output_format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.depth_M < 0:
            raise ValueError("depth must be nonnegative")
        if self.grid_size < 0:
            raise ValueError("grid size must be nonnegative")
        if self.output_format not in ("csv", "json", "text"):
            raise ValueError(f"unknown format {self.output_format!r}")

    def solver_config(self):
        return SolverConfig(
            depth=self.depth_M,
            factor_limit=self.factor_limit,
            grid_size=self.grid_size,
            fx_max_k=self.fx_max_k,
        )


@dataclass
class BatchReport:
    records: list
    total_primes: int = 0
    per_strategy_counts: dict = field(default_factory=dict)
    depth_histogram: dict = field(default_factory=dict)
    max_depth_used: int = 0
    failures: list = field(default_factory=list)
    sieve_hit_rate: float = 0.0
    total_time: float = 0.0
    median_time: float = 0.0
    median_out_of_sieve: float = 0.0

    @classmethod
    def from_records(cls, records):
        kinds = Counter(r.strategy for r in records)
        per_strategy = {k: kinds.get(k, 0) for k in KINDS}
        per_strategy["FAILURE"] = kinds.get("FAILURE", 0)
        solved = [r for r in records if not r.failed]
        # source depth only: grid hits scan nothing and fx walks its own k ladder
        depths = Counter(r.depth for r in solved if r.source.kind in ("f1", "f2", "f0"))
        times = [r.elapsed for r in records]
        outside = [r.elapsed for r in records if r.strategy != "grid"]
        total = len(records)
        return cls(
            records=list(records),
            total_primes=total,
            per_strategy_counts=per_strategy,
            depth_histogram=dict(sorted(depths.items())),
            max_depth_used=max(depths, default=0),
            failures=[r.p for r in records if r.failed],
            sieve_hit_rate=per_strategy["grid"] / total if total else 0.0,
            total_time=sum(times),
            median_time=statistics.median(times) if times else 0.0,
            median_out_of_sieve=statistics.median(outside) if outside else 0.0,
        )


def generate_primes(config):
    rng = random.Random(config.seed)
    gen = candidate_primes(config.range_start - 1, config.mordell_only, rng)
    return [next(gen) for _ in range(config.count)]


@lru_cache(maxsize=8)
def _grid(size):
    return build_grid(size) if size > 0 else None


def _solve_block(args):
    primes, solver_config = args
    grid = _grid(solver_config.grid_size)
    out = []
    for p in primes:
        rec = solve(p, solver_config, grid, checked=True)
        if not rec.failed and not rec.triple.verify():
            raise InconsistencyError(f"unverifiable triple for {p}")
        out.append(rec)
    return out


def _blocks(items, n):
    size, extra = divmod(len(items), n)
    out, start = [], 0
    for j in range(n):
        stop = start + size + (j < extra)
        out.append(items[start:stop])
        start = stop
    return [b for b in out if b]


def run_batch(config, primes=None):
    """Solve ``config.count`` consecutive filtered primes from ``range_start``.

    Primes go to workers in contiguous blocks and the results are merged back
    in index order, so the report does not depend on ``worker_count``.
    """
    if primes is None:
        primes = generate_primes(config)
    solver_config = config.solver_config()
    workers = max(1, min(config.worker_count, len(primes)))
    if workers == 1:
        records = _solve_block((primes, solver_config))
    else:
        jobs = [(block, solver_config) for block in _blocks(primes, workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for chunk in pool.map(_solve_block, jobs) for r in chunk]
    return BatchReport.from_records(records)
