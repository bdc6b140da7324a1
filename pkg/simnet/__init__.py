from simnet.scenario import Partition, ScenarioConfig, SeededView
from simnet.simulator import Simulator, run_scenario
from simnet.streams import derive_streams
from simnet.trace import EventKind, TraceEvent
