"""lacelab: a desk-scale numerical laboratory for lattice Green functions,
expansion diagrams, critical two-point functions and their cross-checks."""

__version__ = "0.1.0"

from .fields import (  # noqa: F401
    FourierGrid,
    LatticeField,
    convolve,
    convolution_power,
    delta_field,
    export_csv,
    field_from_dict,
    fourier_eval,
    load_field,
    save_field,
    weighted_field,
)
from .steps import (  # noqa: F401
    BoundReport,
    CounterexampleParams,
    MomentReport,
    StepDistribution,
    counterexample_step,
    jhat_bounds_check,
    moments,
    nn_step,
)
from .green import (  # noqa: F401
    AsymptoteReport,
    GreenResult,
    GrowthReport,
    HeatSplitResult,
    SplitReport,
    asymptotics_report,
    counterexample_experiment,
    gaussian_constant,
    green_heat_split,
    green_quadrature,
    green_series,
    improved_split_probe,
    lace_two_point,
    resolvent_residual,
)
from .heat import AxisHeatEngine, heat_kernel_gaussian  # noqa: F401
from .frackernel import (  # noqa: F401
    FracKernel,
    conv_bound_check,
    derivative_bound_probe,
    frac_transform,
    frac_transform_negative,
    kernel_eval,
    kernel_eval_integral,
    kernel_fourier_identity,
)
from .diagrams import (  # noqa: F401
    DiagramSet,
    diagram_suite,
    pi_pointwise_exponent,
    pi_sum_bound_saw,
    pivot_factor,
)
from .saw import (  # noqa: F401
    PiSeries,
    SiteSeries,
    enumerate_saw,
    estimate_pc,
    extract_pi_series,
    g_series_eval,
    lambda_check,
    simple_walk_series,
)
from .percolation import (  # noqa: F401
    PercEstimate,
    exhaustive_two_point,
    perc_diagram_bridge,
    sample_two_point,
)
from .bootstrap import BootstrapTrace, gate_table, run_bootstrap  # noqa: F401
