"""Critical-region toolkit for locational marginal emissions over DC
security-constrained economic dispatch.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (
    AmbiguousLmpError,
    BuildStats,
    CompactForm,
    CriticalRegion,
    DegenerateError,
    DispatchSolution,
    Generator,
    InfeasibleError,
    LmpIndex,
    LoadPolytope,
    LocateError,
    NetworkCase,
    RegionDatabase,
    UnknownLmpError,
    ValidationError,
    build_compact,
    build_lmp_index,
    enumerate_regions,
    fd_lme,
    if_lme,
    load_database,
    nodal_prices,
    parse_case,
    parse_case_file,
    solve_sced,
)

__all__ = [
    "AmbiguousLmpError",
    "BuildStats",
    "CompactForm",
    "CriticalRegion",
    "DegenerateError",
    "DispatchSolution",
    "Generator",
    "InfeasibleError",
    "LmpIndex",
    "LoadPolytope",
    "LocateError",
    "NetworkCase",
    "RegionDatabase",
    "UnknownLmpError",
    "ValidationError",
    "build_compact",
    "build_lmp_index",
    "enumerate_regions",
    "fd_lme",
    "if_lme",
    "load_database",
    "nodal_prices",
    "parse_case",
    "parse_case_file",
    "solve_sced",
]

__version__ = "0.1.0"
