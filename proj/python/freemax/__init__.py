"""Transform calculus for max-convolution semigroups on [0, inf).

Thin re-export of the compiled core: law catalog, S-transform calculus,
additive/multiplicative convolution powers, the limit operator, the
max-convolution semigroups, verification drivers, and random-matrix samplers.
"""

from ._core import (  # noqa: F401
    Atom,
    Cdf,
    GridMeasure,
    Law,
    NumericError,
    PhiResult,
    STransform,
    SpectrumSample,
    UnsupportedLawError,
    VerificationReport,
    averaged_ginibre_ks,
    b_t_operator,
    b_t_vee,
    boolean_add_power,
    boolean_max_pow,
    boolean_max_value,
    chi_inverse_catalog,
    classical_max_pow,
    classical_max_value,
    dilate,
    dilation_s_rule,
    free_add_power,
    free_max_pow,
    free_max_value,
    free_mult_power_s,
    ginibre_product_spectrum,
    grid_from_law,
    ks_distance,
    lambda_vee,
    lambda_vee_value,
    phi,
    pi_vee,
    pi_vee_value,
    psi_op,
    s_boolean_power,
    s_bt_composite,
    s_free_power,
    s_transform,
    s_transform_grid,
    sample_wishart_spectrum,
    stable_s_transform,
    verify_limit_props,
    verify_mult_identity,
    verify_thm_bn,
    verify_thm_bn_stable,
    verify_thm_boolean,
    verify_thm_classical,
    verify_thm_free,
    x_vee,
    x_vee_inv,
    x_vee_inv_value,
    x_vee_value,
)

__version__ = "0.1.0"
