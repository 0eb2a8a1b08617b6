"""Event-triggered state estimation over networks with dynamic triggering rules.

Simulation of a plant, a continuous-time observer and per-sensor dynamic
event-triggering mechanisms as one hybrid system, plus the design
inequalities and post-hoc certificate checks that go with it.
"""
from .errors import (BadInput, BadWindow, CertificateFailure, ConfigError,
                     DecayUnachievable, EventObsError, FiniteEscape, InconsistentJump,
                     InvalidSplit, NoEvent, ParameterViolation, ZenoSuspected)
from .etm import (INPUT_CHANNEL, NodeEtmParams, NodeEtmState, design_theorem3,
                  noise_floor, tau_min, trigger_margin, validate_theorem1)
from .hybrid import (HybridState, HybridTime, SimTrace, StateLayout, apply_jumps,
                     integrate_flow_step, locate_event, run_hybrid)
from .kinf import KinfFn
from .loop import BaselineEtm, ClosedLoop, robot_loop
from .observer import (FIXTURE_P, OBSERVER_L, IssCertificate, iss_gains, verify_lmi,
                       vertex_matrices)
from .plant import PlantModel, RobotSignals, robot_arm

__version__ = "0.1.0"
