"""Matrix-optics simulation of noise refocusing in perfect-crystal neutron interferometers."""
__version__ = "0.1.0"

from .errors import (ComparisonError, ConvergenceError, DomainError, IngestionError, NIError, ParseError,
                     RangeError, UndefinedContrastError, UnsupportedOperationError, UsageError, ValidationError)
from .geometry import GeometryKind, InterferometerSpec, assemble, closed_form_intensity, enumerate_paths
from .vibration import Axis, NoiseSpec, PhysicalParams, coherence
from .dyndiff import DDProfile, MomentumDistribution, averaged_interferogram_dd
from .analysis import (averaged_interferogram, coherence_sweep, contrast, density_map, fit_fringe,
                       refocused_interferogram)
from .estimators import CoherenceEstimator, FringeFitter
from .config import RunConfig, load_config, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
