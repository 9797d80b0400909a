"""Potential theory on the unit sphere."""

from ._core import (
    COMMANDS,
    Error,
    NumericalError,
    ValidationError,
    boundary_grid,
    cap_grid,
    dirichlet_green,
    dirichlet_solve,
    fundamental,
    inner_harmonic,
    load_field_csv,
    neumann_green,
    neumann_solve,
    random_vortices,
    run,
    save_field_csv,
    sphere_grid,
    unit_vector,
    vd_round_trip,
    vortex_mfs,
)

__all__ = [
    "COMMANDS",
    "Error",
    "NumericalError",
    "ValidationError",
    "boundary_grid",
    "cap_grid",
    "dirichlet_green",
    "dirichlet_solve",
    "fundamental",
    "inner_harmonic",
    "load_field_csv",
    "neumann_green",
    "neumann_solve",
    "random_vortices",
    "run",
    "save_field_csv",
    "sphere_grid",
    "unit_vector",
    "vd_round_trip",
    "vortex_mfs",
]
