"""RIS-assisted MIMO link toolkit.

Library surface, by capability:

* :mod:`rismimo.geometry` - frames, element placement, element patterns.
* :mod:`rismimo.ris` - panel model, 1-bit profile synthesis, beam patterns.
* :mod:`rismimo.channel` - direct/cascade/scatter channel synthesis.
* :mod:`rismimo.metrics` - gain, effective rank, water-filling capacity, EIRP.
* :mod:`rismimo.pso` - 4-parameter beam search.
* :mod:`rismimo.sweeps`, :mod:`rismimo.scenario` - file formats.
"""

from .channel import (
    Band,
    ChannelMatrix,
    DirectPath,
    FrequencySweep,
    ScatterSpec,
    Scenario,
    direct_channel,
    grid_resolves_phase,
    max_path_delay_s,
    ris_cascade,
    scatter_channel,
    synthesize,
)
from .geometry import (
    C0,
    AntennaArray,
    DipolePattern,
    IsotropicPattern,
    Pose,
    SectorPattern,
    SphericalCoord,
    cartesian_to_spherical,
    linear_array,
    path_length,
    pattern_gain,
    spherical_to_cartesian,
    vec3,
)
from .metrics import (
    CapacityCurve,
    MetricsReport,
    SingularSpectrum,
    band_gain,
    capacity_curve,
    channel_gain,
    effective_rank,
    eirp_to_tx_power,
    equal_power_capacity,
    mean_effective_rank,
    metrics_report,
    noise_power_w,
    singular_spectrum,
    total_eirp_dbm,
    waterfill_allocation,
    waterfilling_capacity,
    write_report,
)
from .pso import (
    OptimizationResult,
    SearchParams,
    SwarmConfig,
    SwarmState,
    fitness,
    init_swarm,
    optimize,
    params_at,
    realize_config,
    step,
)
from .ris import (
    POLARIZATIONS,
    FocusTarget,
    RisConfig,
    RisPanel,
    beam_pattern,
    config_from_text,
    config_to_text,
    desired_phase,
    gamma_states_with_loss,
    phase_profile_for_focus,
    quantize_phase,
    reradiated_field,
)
from .scenario import (
    SchemaError,
    bundled_scenario_path,
    load_scenario,
    load_swarm_config,
)
from .sweeps import DeembedError, SweepFormatError, deembed, export_sweep, ingest_sweep

__version__ = "0.1.0"
