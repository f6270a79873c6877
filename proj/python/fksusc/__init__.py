"""Dynamical charge susceptibility of the Falicov-Kimball model on the Matsubara axis."""

from ._core import (
    Bath,
    Equilibrium,
    Error,
    FkParams,
    InputError,
    MatsubaraGrid,
    NumericalError,
    StaticComponentError,
    atomic_bath,
    bare_bubble,
    chi_closed_form,
    chi_direct,
    dmft_bethe,
    load_bath,
    oracle_report,
    run,
    single_level_bath,
    susceptibility,
    sweep,
    tail_estimate,
    validate_config,
    vertex,
    write_bath,
)

__version__ = "1.0.0"
