"""Three-term Egyptian fractions 4/p = 1/x + 1/y + 1/z via ceiling continued fractions."""

from .cf_core import CeilingCF, Rational, UnitFractionSum, fct_expand, sum_by_pairs, three_term_check
from .factorization import PartialFactorization, divisors_from, factor_bounded, is_probable_prime
from .harness import BatchConfig, BatchReport, mordell_filter, next_candidate_prime, run_batch
from .strategies import (
    CongruenceGrid,
    EgyptianTriple,
    SolutionRecord,
    SolverConfig,
    SourceLabel,
    build_grid,
    construct_triple,
    grid_lookup,
    solve,
    solve_f0,
    solve_f1,
    solve_f2,
    solve_fx,
)

__version__ = "0.1.0"
