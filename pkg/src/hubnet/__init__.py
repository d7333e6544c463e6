"""Middle-mile hub network design: choose hubs, map DCs, size sorters, cost the network."""

__version__ = "0.1.0"

from .assignment import NetworkDesign, assign_sites, decode, hub_throughputs, size_sorter
from .costs import CostBreakdown, evaluate
from .ga import GaConfig, GaResult, repair, run_ga
from .geo import GeoParams, build_distance_matrix, haversine_km, road_km
from .model import Constraints, CostParams, FlowRecord, Problem, Site, make_problem, validate_problem
from .oracle import brute_force_solve, enumerate_feasible
from .scenario import breach_reduction, compare_scenarios, rationalize
from .synth import generate, gravity_flows, top_decile_share
