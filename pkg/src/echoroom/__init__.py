"""Deterministic simulation of accessible-AR interaction techniques.

Surface scanning with spoken feedback, two placement modes, two search
modes, a screen-reader element bridge with freeze, scripted scenario
replay, and a live websocket session service.
"""

from .geometry import GeometryError, Vec2, Vec3, horizontal_distance
from .scan import ScanGoal, ScanState, check_goal, scan_summary, step_scan
from .scene import (
    BoxDims,
    Config,
    DeviceFrame,
    InvariantError,
    Orientation,
    Plane,
    PlaneKind,
    Pose,
    Snapshot,
    VirtualObject,
    World,
    freeze,
)
from .scenario import (
    Scenario,
    SchemaError,
    Script,
    Step,
    StepPreconditionError,
    load_scenario,
    load_script,
    run_script,
)
from .session import CatalogItem, Session, SessionError

__version__ = "0.1.0"

__all__ = [
    "BoxDims",
    "CatalogItem",
    "Config",
    "DeviceFrame",
    "GeometryError",
    "InvariantError",
    "Orientation",
    "Plane",
    "PlaneKind",
    "Pose",
    "ScanGoal",
    "ScanState",
    "Scenario",
    "SchemaError",
    "Script",
    "Session",
    "SessionError",
    "Snapshot",
    "Step",
    "StepPreconditionError",
    "Vec2",
    "Vec3",
    "VirtualObject",
    "World",
    "check_goal",
    "freeze",
    "horizontal_distance",
    "load_scenario",
    "load_script",
    "run_script",
    "scan_summary",
    "step_scan",
    "__version__",
]
