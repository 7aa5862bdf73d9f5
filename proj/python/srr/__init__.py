"""Secrecy rate regions for joint multicast and confidential MIMO
transmission with artificial noise."""

from ._core import (  # noqa: F401
    AoResult,
    BoundaryRecord,
    ChannelSet,
    CovarianceTriple,
    DcResult,
    DomainError,
    RatePoint,
    RegionBoundary,
    TraceRow,
    ao_solve,
    complexity_estimate,
    compute_tau_max,
    confidential_capacity,
    db_to_linear,
    dc_solve,
    eavesdrop_capacity,
    generate_channels,
    linear_to_db,
    load_channels,
    max_leakage,
    multicast_capacity,
    multicast_rate,
    rate_point,
    save_channels,
    secrecy_rate,
    trace_region_ao,
    trace_region_dc,
    weighted_objective,
)

__all__ = [
    "AoResult",
    "BoundaryRecord",
    "ChannelSet",
    "CovarianceTriple",
    "DcResult",
    "DomainError",
    "RatePoint",
    "RegionBoundary",
    "TraceRow",
    "ao_solve",
    "complexity_estimate",
    "compute_tau_max",
    "confidential_capacity",
    "db_to_linear",
    "dc_solve",
    "eavesdrop_capacity",
    "generate_channels",
    "linear_to_db",
    "load_channels",
    "max_leakage",
    "multicast_capacity",
    "multicast_rate",
    "rate_point",
    "save_channels",
    "secrecy_rate",
    "trace_region_ao",
    "trace_region_dc",
    "weighted_objective",
]
