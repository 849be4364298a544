"""g2calib: numerical G2/Spin(7) calibrated geometry on flat model spaces."""

__version__ = "0.1.0"

from .backend import BACKEND
from .octonion import (
    quat_mul, quat_conj, quat_norm, quat_exp_im,
    oct_mul, oct_conj, oct_norm,
    vec7_to_oct, oct_to_vec7, vec8_to_oct, oct_to_vec8,
    cross7, cross7_batch, triple_cross8,
    FANO_TRIPLES, IM_BASIS_OCT,
)
from .forms import (
    AlternatingForm, VectorValued3Form, Metric7,
    phi0, star_phi0, psi8, hodge_star,
    chi_form, chi_flat, chi_via_cross, chi_via_cross_batch,
    metric_from_phi, cross_from_phi, cross_from_phi_batch,
)
from .grassmann import (
    Frame, CalibrationReport, Immersion3Lattice,
    associative_test, coassociative_test, cayley_test,
    normal_basis, normal_complex_structure,
    sample_grassmann, project_to_associative, chi_flow_step,
)
from .lie import (
    G2Basis, G2BlockForm, So4BlockElement,
    lie_action_on_3forms, compute_g2_basis, g2_block_form,
    so4_action, so4_block_matrix,
    clifford_mult, clifford_matrix, clifford_kernel_dim, clifford_rank,
)
from .deformations import (
    LambdaParam, SplitFrame,
    phi_lambda, phi_lambda_contracted, star_phi_lambda,
    cross_lambda, f_locus_defect,
)
from .dirac import (
    Connection1Form, SWState,
    dirac_apply, dirac_matrix, dirac_spectrum,
    operator_asymmetry, kernel_dimension, kernel_constant_dimension,
    analytic_spectrum, sector_kernel_dims,
    sigma_map, sigma_field, sw_residual, sw_linearization, gauge_transform,
    sw_index_formula,
)
from .verify import run_verification, VerificationReport, CheckResult
