"""Finite-volume POD-Galerkin reduced-order modelling of vortex shedding."""

from ._core import (
    DimensionMismatch,
    InvalidArgument,
    Mesh,
    MissingInput,
    PipelineConfig,
    PodfvError,
    ReducedSystem,
    SolverFailure,
    StaleArtifact,
    assemble,
    channel_mesh,
    correlation_matrix,
    cumulative_energy,
    divergence_of_flux,
    eig_spectrum,
    evaluate,
    gauss_gradient,
    hf_run,
    integrate,
    laplacian,
    load_mesh,
    mesh_gen,
    pipeline,
    pod,
    psd_peak_frequency,
    read_basis,
    read_forces,
    rom_run,
    save_mesh,
    strouhal,
    usable_mode_count,
    velocity_modes,
    wape,
    wape_shifted_drag,
    zero_crossing_period,
)

__all__ = [name for name in dir() if not name.startswith("_")]
