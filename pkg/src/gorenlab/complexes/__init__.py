"""Bounded complexes, minimal free resolutions, Ext and Tor, depth."""
from .complex import BoundedComplex, Resolution, TermLabel, direct_sum_complexes
from .derived import (ExtTorTable, PeriodicityCertificate, TableEntry, WindowStatus, combine_status,
                      depth, detect_periodicity, ext, ext_dim, periodicity_of, tor, tor_dim,
                      window_status)
from .minimize import (MinimizationData, complex_rmatrices, is_minimal_complex, minimize_complex,
                       rmat_identity, rmat_mul)
from .resolution import (DEFAULT_BOUND, FreeResolution, betti_numbers, minimal_free_resolution,
                         resolution_of, syzygy)


def homology(X: BoundedComplex, n: int):
    """H_n(X) = ker d_n / im d_{n+1}."""
    return X.homology(n)
