"""abqsim: gauge-aware lattice quantum dynamics.

Numerical realization of the two faces of flux-threading interference:
an instantaneous modular-momentum jump when wave packets straddle the
flux line, and a continuously unfolding entanglement between a charged
particle and the flux source, plus an exact two-rotor source model.
"""

from .config import SCENARIOS, ScenarioConfig, default_config, parse_config
from .errors import AbqsimError, ConfigurationError, NumericalFailure, ScenarioError
from .fields import (Grid2D, ScalarField, VectorField, WaveField, bump_packet,
                     bump_profile, gaussian_packet, make_grid, superpose)
from .gauge import (GaugeField, GaugeFunction, angle_gauge_function, gauge_transform,
                    loop_phase, plaquette_flux, quantized_flux_values, solenoid_plaquette,
                    string_gauge, symmetric_gauge, total_flux, zero_gauge)
from .observables import (current, density, expectation_canonical_momentum,
                          expectation_position, expectation_velocity,
                          modular_momentum_expectation)
from .propagators import (LineSystemState, PropagatorConfig, disk_mask, evolve_lattice,
                          evolve_line_system, evolve_staged, free_evolution,
                          make_line_system)
from .rotor import (RotorParams, RotorState, coherent_angular_state, circular_mean,
                    circular_spread, coupling_decomposition, cylinder_eigenstate,
                    energy_level, entanglement_entropy, evolve_rotor, product_state,
                    reduced_cylinder_state, shift_unitary)
from .scenarios import (ScenarioReport, Verdict, gaussian_sigma_t, run_continuous_aspect,
                        run_flux_quantization_sweep, run_gauge_invariance,
                        run_instantaneous_aspect, run_madelung_demo)
from .snapshot_io import read_snapshot, read_timeseries, write_report, write_snapshot, write_timeseries

__version__ = "1.0.0"
