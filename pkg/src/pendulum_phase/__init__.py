"""Phase-plane analysis of the driven, damped pendulum on the cylinder.

``phi'' + gamma*phi' + sin(phi) = beta`` is studied through its saddle
separatrices, the critical drive ``beta0(gamma)`` at which they connect, and
the rotational limit cycle that exists above it.
"""

__version__ = "0.1.0"

from .errors import (ClassificationAmbiguous, Degenerate, DomainError, NoCycle,  # noqa: E402
                     NumericalError, PendulumError, StiffnessFailure)
from .model import (FieldVector, FixedPoint, FixedPointKind, ModelParams,  # noqa: E402
                    PhaseState, Region, classify_region, curve_g, divergence, energy,
                    equilibria, main_interval, rhs, rotation_rate_beta,
                    rotation_rate_gamma, separatrix_slopes, slope_field,
                    wrap_to_main_interval)
from .integrate import (AxisEvent, CaptureEvent, EventKind, IntegrationControls,  # noqa: E402
                        LineEvent, TerminalEvent, TrajectorySegment, integrate_graph,
                        integrate_time)
from .connection import (CriticalResult, ShootKind, ShootOutcome,  # noqa: E402
                         critical_beta, gamma_min, plateau_reached,
                         shoot_unstable_manifold)
from .cycle import (FirstKindReport, PeriodicOrbit, find_limit_cycle,  # noqa: E402
                    poincare_map, section_phi, verify_no_first_kind_cycle)
from .sweep import (Portrait, SweepRow, critical_curve, hysteresis_scan,  # noqa: E402
                    phase_portrait, velocity_curve)
