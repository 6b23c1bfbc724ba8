from ._sqg import (
    Grid,
    H_N,
    K_alpha,
    SqgError,
    cos_power_integral,
    couple_parameters,
    dirichlet_C0,
    fractional_laplacian,
    invert_coupling,
    library_version,
    riesz_velocity,
    sin_power_integral,
    sobolev_norm,
    standard_ansatz,
)
from ._sqg import run_experiment as _run_experiment


def run_experiment(name, **settings):
    """Run an experiment; keyword names use '_' for '.', e.g. grid_n=256."""
    flat = {}
    for key, value in settings.items():
        key = key.replace("grid_", "grid.").replace("commutator_", "commutator.")
        if isinstance(value, (list, tuple)):
            value = ", ".join(str(v) for v in value)
        flat[key] = str(value)
    return _run_experiment(name, flat)


__version__ = library_version()
