"""Direct measurement of nonlocal bipartite pure states from modular values.

Simulates the qubit-meter protocol end to end: meter preparation,
controlled-phase interactions, postselection, detector probabilities,
modular-value inversion, and amplitude reconstruction, plus photon-counting
Monte Carlo error propagation and a linear-inversion tomography baseline.
"""

from .errors import (
    AllTrialsRejected,
    ConfigError,
    ModvalError,
    NegativeDiscriminant,
    OrthogonalPostselection,
    ZeroReferenceWeakValue,
)
from .hilbert import (
    DEFAULT_TOL,
    LinearOperator,
    PureState,
    Tolerances,
    apply,
    basis_state,
    exp_projector_phase,
    identity,
    inner,
    normalize,
    partial_inner,
    projector,
    tensor,
)
from .noise import (
    CountingConfig,
    DetectionRecord,
    MonteCarloResult,
    NoisyEstimate,
    monte_carlo,
    sample_counts,
    sample_detection,
    sample_pauli_expectations,
    trial_rng,
)
from .presets import (
    alt_postselection,
    phase_bell,
    postselection_preset,
    state_preset,
    uniform_plus,
)
from .protocol import (
    MeterOutcome,
    ProtocolConfig,
    build_interaction,
    prepare_meter,
    run_protocol,
)
from .reconstruction import (
    MeasurementPlan,
    ModularEstimate,
    ReconstructionResult,
    Setting,
    collect_probabilities,
    definitional_modulars,
    measurement_plan,
    modular_definitional,
    modular_exact_inversion,
    modular_first_order,
    reconstruct,
    reconstruct_state,
    s_parameter,
    shift_modular,
    weak_definitional,
    weak_from_modulars,
)
from .tomography import (
    DensityMatrix,
    fidelity_pure,
    fidelity_states,
    linear_inversion,
    pauli_expectations,
    tomography_settings,
)

__version__ = "0.1.0"
