"""Higher Mertens constants, fine-scale expansions of R_k(x) and S_k(x), and
brute-force prime-sieve oracles to check them against."""

from .constants import ConstantsTable, alpha, alpha_ja, beta, default_table, ratio_table
from .expansion import Expansion, ExpansionTerm, generate_R4, generate_Sk
from .numkernel import DEFAULT_PREC, HPReal, PowerSeries, precision
from .oracle import OracleResult, pq_a_sum, rk_sieve, sk_recursive
from .zetaprime import eta_coeffs, prime_zeta, zeta

__version__ = "0.1.0"

__all__ = [
    "ConstantsTable",
    "DEFAULT_PREC",
    "Expansion",
    "ExpansionTerm",
    "HPReal",
    "OracleResult",
    "PowerSeries",
    "alpha",
    "alpha_ja",
    "beta",
    "default_table",
    "eta_coeffs",
    "generate_R4",
    "generate_Sk",
    "pq_a_sum",
    "precision",
    "prime_zeta",
    "ratio_table",
    "rk_sieve",
    "sk_recursive",
    "zeta",
]
