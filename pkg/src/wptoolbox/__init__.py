"""Polarization-encoded wave/particle interferometry toolbox.

A small simulator for a four-path interferometer in which a photon's
"wave" and "particle" behaviours are placed in superposition, together
with its two-photon (entangled) and n-photon extensions, an equivalent
birefringent hardware layout, Monte Carlo counting statistics, and a
CSV/JSON command-line front end.
"""

from .entangle import (
    CoincidenceTable,
    TwoPhotonSettings,
    coincidence_closed_forms,
    coincidence_probabilities,
    concurrence,
    entanglement_witness,
    ghz_output,
    ghz_sector_probabilities,
    mixture_coincidence_probabilities,
    mixture_two_photon_output,
    prepare_entangled_input,
    sector_projection,
    two_photon_output,
    vh_variant_output,
    wootters_concurrence,
)
from .hardware import (
    DEFAULT_HWP_ANGLES,
    VALIDATED_BETAS,
    HardwareLayout,
    beam_displacer,
    build_hardware_layout,
    describe,
    equivalence_check,
    equivalence_scan,
    hardware_output,
    hwp_jones,
)
from .optics import (
    PATHS,
    POLS,
    Circuit,
    ElementUnitary,
    balanced_bs,
    interferometer_circuit,
    network_matrix,
    output_mixer,
    phase_shifter,
    polarizing_bs,
)
from .qcore import (
    DensityMatrix,
    ModeBasis,
    PureState,
    apply_unitary,
    measure_distribution,
    mix,
    partial_trace,
    product_basis,
    pure_density,
    tensor,
)
from .shots import (
    CountTable,
    NoiseModel,
    WitnessEstimate,
    apply_noise,
    estimate_probabilities,
    estimate_witness,
    noisy_coincidence_probabilities,
    noisy_single_probabilities,
    poisson_error,
    sample_counts,
)
from .toolbox import (
    BETA_DIRECT,
    BETA_SPLIT,
    SingleProbabilities,
    ToolboxPhases,
    coherence,
    coherence_witness,
    detection_probabilities,
    interference_terms,
    mixed_output,
    output_state,
    particle_state,
    prepare_input,
    wave_state,
)

__version__ = "0.1.0"

__all__ = [
    "BETA_DIRECT",
    "BETA_SPLIT",
    "Circuit",
    "CoincidenceTable",
    "CountTable",
    "DEFAULT_HWP_ANGLES",
    "DensityMatrix",
    "ElementUnitary",
    "HardwareLayout",
    "ModeBasis",
    "NoiseModel",
    "PATHS",
    "POLS",
    "PureState",
    "SingleProbabilities",
    "ToolboxPhases",
    "TwoPhotonSettings",
    "VALIDATED_BETAS",
    "WitnessEstimate",
    "apply_noise",
    "apply_unitary",
    "balanced_bs",
    "beam_displacer",
    "build_hardware_layout",
    "coherence",
    "coherence_witness",
    "coincidence_closed_forms",
    "coincidence_probabilities",
    "concurrence",
    "describe",
    "detection_probabilities",
    "entanglement_witness",
    "equivalence_check",
    "equivalence_scan",
    "estimate_probabilities",
    "estimate_witness",
    "ghz_output",
    "ghz_sector_probabilities",
    "hardware_output",
    "hwp_jones",
    "interference_terms",
    "interferometer_circuit",
    "measure_distribution",
    "mix",
    "mixed_output",
    "mixture_coincidence_probabilities",
    "mixture_two_photon_output",
    "network_matrix",
    "noisy_coincidence_probabilities",
    "noisy_single_probabilities",
    "output_mixer",
    "output_state",
    "partial_trace",
    "particle_state",
    "phase_shifter",
    "poisson_error",
    "polarizing_bs",
    "prepare_entangled_input",
    "prepare_input",
    "product_basis",
    "pure_density",
    "sample_counts",
    "sector_projection",
    "tensor",
    "two_photon_output",
    "vh_variant_output",
    "wave_state",
    "wootters_concurrence",
]
