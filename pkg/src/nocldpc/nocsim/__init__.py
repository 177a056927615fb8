from .topology import OPPOSITE, Port, Topology, route_o1turn, torus_distance
from .schedule import InjectionSchedule, build_schedule
from .trace import NocTrace, SimulationDeadlock
from .simulate import simulate_iteration

_REPLAY_EXPORTS = ("ReplayIntegrityError", "ReplayWiring", "replay_decode", "validate_config")


def __getattr__(name):
    # replay pulls in configgen (which itself uses the schedule builder), so
    # it loads lazily to keep the package import acyclic
    if name in _REPLAY_EXPORTS:
        from . import replay

        return getattr(replay, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "InjectionSchedule",
    "NocTrace",
    "OPPOSITE",
    "Port",
    "ReplayIntegrityError",
    "SimulationDeadlock",
    "Topology",
    "build_schedule",
    "replay_decode",
    "route_o1turn",
    "simulate_iteration",
    "torus_distance",
    "validate_config",
]
