"""fraclap: radially-reduced fractional potential theory.

A numerical toolbox for the fractional Laplacian and its relatives on
radial functions: principal-value evaluation, Riesz potentials, ball
Green and Poisson kernels, nonlocal averages, Kelvin transforms, the
derivative-kernel sign trichotomy with its monotonicity counterexample,
and the Liouville-region classification with the bootstrap exponent
recursion.
"""

from .core import (
    ProblemParams,
    QuadratureSpec,
    RadialFunction,
    Tail,
    default_grid,
    load_radial,
    make_radial,
    radial_from_callable,
    save_radial,
    validate,
)
from .quad import (
    Integrand1D,
    integrate,
    integrate_pv_symmetric,
    pv_truncated,
    sphere_mean_diff,
)
from .kernels import (
    BallKernelParams,
    KernelConstants,
    frac_constant,
    frac_laplacian,
    green_ball,
    green_constant,
    green_inner,
    kelvin,
    kernel_constants,
    poisson_ball,
    poisson_constant,
    riesz_constant,
    riesz_potential,
    ring_kernel,
    sphere_area,
)
from .averages import (
    DecayReport,
    LocalDecayReport,
    decay_exponents,
    fit_decay,
    local_decay_check,
    nonlocal_average,
)
from .lemmas import (
    CounterexampleReport,
    RepresentationIdentity,
    SignLemmaResult,
    annulus_bump_radial,
    build_counterexample,
    representation_identity,
    sign_integral_surface,
    sign_integral_theta,
    sign_lemma_check,
    smooth_bump,
)
from .liouville import (
    ExponentSequence,
    PicardTrajectory,
    RegionMap,
    RegionVerdict,
    VERDICTS,
    bootstrap,
    classify,
    kelvin_defect,
    picard_iterate,
    region_map,
)
from . import errors

__version__ = "0.1.0"

# The library's operation surface; the CLI coverage test checks that every
# entry is reachable through exactly one subcommand.
OPERATIONS = {
    "validate": validate,
    "make_radial": make_radial,
    "integrate": integrate,
    "integrate_pv_symmetric": integrate_pv_symmetric,
    "riesz_constant": riesz_constant,
    "ring_kernel": ring_kernel,
    "riesz_potential": riesz_potential,
    "frac_laplacian": frac_laplacian,
    "green_ball": green_ball,
    "poisson_ball": poisson_ball,
    "kelvin": kelvin,
    "nonlocal_average": nonlocal_average,
    "decay_exponents": decay_exponents,
    "fit_decay": fit_decay,
    "local_decay_check": local_decay_check,
    "sign_integral_surface": sign_integral_surface,
    "sign_integral_theta": sign_integral_theta,
    "build_counterexample": build_counterexample,
    "representation_identity": representation_identity,
    "classify": classify,
    "bootstrap": bootstrap,
    "kelvin_defect": kelvin_defect,
    "picard_iterate": picard_iterate,
    "region_map": region_map,
}

__all__ = [
    "ProblemParams", "QuadratureSpec", "RadialFunction", "Tail",
    "default_grid", "load_radial", "make_radial", "radial_from_callable",
    "save_radial", "validate",
    "Integrand1D", "integrate", "integrate_pv_symmetric", "pv_truncated",
    "sphere_mean_diff",
    "BallKernelParams", "KernelConstants", "frac_constant", "frac_laplacian",
    "green_ball", "green_constant", "green_inner", "kelvin",
    "kernel_constants", "poisson_ball", "poisson_constant", "riesz_constant",
    "riesz_potential", "ring_kernel", "sphere_area",
    "DecayReport", "LocalDecayReport", "decay_exponents", "fit_decay",
    "local_decay_check", "nonlocal_average",
    "CounterexampleReport", "RepresentationIdentity", "SignLemmaResult",
    "annulus_bump_radial", "build_counterexample", "representation_identity",
    "sign_integral_surface", "sign_integral_theta", "sign_lemma_check",
    "smooth_bump",
    "ExponentSequence", "PicardTrajectory", "RegionMap", "RegionVerdict",
    "VERDICTS", "bootstrap", "classify", "kelvin_defect", "picard_iterate",
    "region_map",
    "errors", "OPERATIONS",
]
