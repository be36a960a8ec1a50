"""Cheating Robot: engine, exact solver and strategies for the pursuit game
where the evader sees the cops' announced moves before responding."""

from .errors import InputError, ResourceLimitError, StrategyError
from .graphs import (Graph, build_graph, cartesian_grid, cartesian_product,
                     complete, core_numbers, cycle, dismantling_order,
                     extend_paths_retract, fan, figure1_graph,
                     figure1_retraction, graph_hash, hypercube, max_core, path,
                     petersen, random_tree, read_graph_text, star, strong_grid,
                     strong_product, verify_retraction, write_graph_text,
                     CoreCertificate, DismantlingOrder, RetractionMap)
from .engine import (apply_round, joint_cop_moves, place, safe_responses,
                     simulate, Captured, CaptureKind, Continue, GameState,
                     JointCopMove, RobotPolicy, ScriptedRobot, Trace, TraceEnd)
from .solver import (ccr, classic_cop_number, cop_win_table, decide,
                     optimal_robot_policy, verify_strategy, CaptureCertificate,
                     EscapeWitness, SolverBudget, WinTable)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
