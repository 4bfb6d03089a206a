"""One-shot entanglement-assisted quantum channel simulation bounds.

Library layout:

* linalg       -- dense complex linear algebra (eigen, matrix functions,
                  tensor products, partial traces)
* sdp          -- interior-point solver for Hermitian block SDPs
* quantum      -- states, channels, protocol assembly
* divergences  -- fidelity (closed form and SDP), max-divergence, sandwiched
                  Renyi divergence, max-information, partial smoothing
* capacity     -- mutual information, entanglement-assisted capacity, Renyi
                  channel mutual information
* bounds       -- one-shot achievability/converse evaluators and sweeps
* harness      -- property suites (convexity, concavity, minimax, AEP trend)
* cli          -- command-line front end
"""

from .bounds import BoundReport, achievability_bound, asymptotic_fudge, converse_bound, sweep
from .capacity import (
    CapacityResult,
    OptimizerConfig,
    capacity_CE,
    mutual_info,
    renyi_channel_mutual_info,
    renyi_mi_product,
)
from .divergences import (
    SmoothingSpec,
    dmax,
    f_channel,
    f_choi_sdp,
    fidelity,
    imax,
    relative_entropy,
    root_fidelity_sdp,
    sandwiched_renyi,
    smoothed_dmax,
)
from .harness import (
    PropertyReport,
    aep_trend,
    check_concavity_in_channel,
    check_lemma1,
    check_restricted_minimax,
)
from .quantum import (
    DensityOperator,
    ELOCCProtocol,
    PureState,
    QuantumChannel,
    canonical_purification,
    choi_to_kraus,
    constant_channel,
    dephasing,
    depolarizing,
    elocc_to_channel,
    identity_channel,
    joint_output,
    kraus_to_choi,
    maximally_mixed,
    random_channel,
    random_density,
    stinespring,
)

__version__ = "0.1.0"
