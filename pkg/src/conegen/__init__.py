"""Generators for linear, semidefinite and second-order cone optimization
test instances with certified interior/optimal/maximally-complementary
solutions, plus independent verification and standard-format export."""

from .controls import GenControls
from .randkit import (
    GenerationError,
    MatrixRecipe,
    RngStream,
    gen_conditioned,
    gen_matrix,
    gen_orthonormal,
    gen_psd,
    next_uniform,
)
from .lo_gen import LinearInstance, LoCertificate, gen_lo_both, gen_lo_interior, gen_lo_optimal
from .sdo_gen import (
    SdoCertificate,
    SdoInstance,
    gen_sdo_block_both,
    gen_sdo_block_optimal,
    gen_sdo_eig_both,
    gen_sdo_eig_optimal,
    gen_sdo_interior,
    gen_sdo_maxcomp,
    gen_sdo_maxcomp_Bempty,
    gen_sdo_maxcomp_both,
)
from .soco_gen import (
    SocoCertificate,
    SocoInstance,
    gen_soco_both,
    gen_soco_interior,
    gen_soco_maxcomp,
    gen_soco_maxcomp_both,
    gen_soco_optimal,
    interiorize,
    jordan_product,
)
from .certify import Tolerances, VerifyReport, lo_bruteforce_optimal, verify_lo, verify_sdo, verify_soco

__version__ = "0.1.0"

__all__ = [
    "GenControls",
    "GenerationError",
    "MatrixRecipe",
    "RngStream",
    "next_uniform",
    "gen_matrix",
    "gen_conditioned",
    "gen_psd",
    "gen_orthonormal",
    "LinearInstance",
    "LoCertificate",
    "gen_lo_interior",
    "gen_lo_optimal",
    "gen_lo_both",
    "SdoInstance",
    "SdoCertificate",
    "gen_sdo_interior",
    "gen_sdo_block_optimal",
    "gen_sdo_block_both",
    "gen_sdo_eig_optimal",
    "gen_sdo_eig_both",
    "gen_sdo_maxcomp",
    "gen_sdo_maxcomp_Bempty",
    "gen_sdo_maxcomp_both",
    "SocoInstance",
    "SocoCertificate",
    "jordan_product",
    "interiorize",
    "gen_soco_interior",
    "gen_soco_optimal",
    "gen_soco_maxcomp",
    "gen_soco_both",
    "gen_soco_maxcomp_both",
    "Tolerances",
    "VerifyReport",
    "verify_lo",
    "verify_sdo",
    "verify_soco",
    "lo_bruteforce_optimal",
]
