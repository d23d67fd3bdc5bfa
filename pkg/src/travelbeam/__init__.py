"""Link-level study of UE beamforming strategies under mobility.

The package synthesizes time-varying NLOS MIMO channels through point
scatterers with a near-field spherical-wave response, evaluates UE
beamforming strategies under BS-side maximum ratio combining along UE
trajectories, and provides the closed-form worst-case Doppler spread
analysis that motivates steering the UE beam along its travel axis.
"""

from .geometry import GeometryError, Point2, Trajectory, UlaGeometry
from .channel import ChannelSnapshot, RadioConfig, ScattererField
from .beamforming import BeamSpec, CombinerState, Strategy
from .doppler import DopplerParams, SpreadBranch, SpreadResult, optimal_pointing
from .sim import (
    CoherenceReport,
    MonteCarloReport,
    RandomField,
    Scenario,
    SnrTrace,
    coherence_distance,
    coherence_report,
    monte_carlo,
    run_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "BeamSpec",
    "ChannelSnapshot",
    "CoherenceReport",
    "CombinerState",
    "DopplerParams",
    "GeometryError",
    "MonteCarloReport",
    "Point2",
    "RadioConfig",
    "RandomField",
    "Scenario",
    "ScattererField",
    "SnrTrace",
    "SpreadBranch",
    "SpreadResult",
    "Strategy",
    "Trajectory",
    "UlaGeometry",
    "__version__",
    "coherence_distance",
    "coherence_report",
    "monte_carlo",
    "optimal_pointing",
    "run_trajectory",
]
