"""oscillab: a numerical laboratory for bilinear oscillatory Fourier multipliers.

Periodic-grid spectral machinery, dyadic frequency frames, oscillatory
kernel asymptotics, and scaling experiments that turn analytic growth
exponents into fitted log2 slopes.
"""

from .atoms import Atom, make_atom, split_wide_bump, validate_atom
from .experiments import (
    LemmaSuite,
    NecessityConfig,
    TestFamily,
    bilinear_identity_check,
    build_test_family,
    family_norm_report,
    quasi_lr,
    run_necessity,
    run_necessity_orders,
    window_lowerbound_study,
)
from .frame import AuxCutoffs, LPFrame, build_aux_cutoffs, build_frame, eval_cutoff, poly_step, smooth_step
from .grid import (
    AliasingError,
    GridSpec,
    SampledField,
    ScalingReport,
    bmo_estimate,
    fit_dyadic_slope,
    forward_ft,
    inverse_ft,
    lp_norm,
)
from .kernels import (
    KernelRecord,
    StationaryData,
    WindowConstants,
    classify_decay_region,
    compute_Hj,
    compute_Kj,
    compute_L,
    oracle_Hj,
    oracle_kernel,
    shell_split,
    stationary_phase_leading,
    stationary_point,
)
from .operators import (
    GoalSumResult,
    LinearPiece,
    apply_bilinear,
    apply_linear,
    four_product_split,
    goal_sum,
    make_Sj,
    make_T,
    make_Tj,
    modulated_plateau,
)
from .symbols import (
    CMBlock,
    CMDecomposition,
    SeparableExpansion,
    SeparableSymbol,
    SeparableTerm,
    SymbolSpec,
    build_necessity_symbol,
    classify_region,
    coifman_meyer_decompose,
    constant_symbol,
    critical_order,
    elliptic_symbol,
    separable_expand,
    split_frequency_quadrants,
    verify_symbol_class,
)

__version__ = "0.1.0"
