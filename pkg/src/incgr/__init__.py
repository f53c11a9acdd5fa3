"""Goal recognition over incomplete STRIPS domain models using landmarks."""

from incgr.grounding import GroundAction, GroundedTask, count_completions, ground
from incgr.landmarks import LandmarkSet, extract_landmarks, extract_overlooked
from incgr.model import Atom, Fact, IncompleteDomain, IncompleteOperator, RecognitionProblem
from incgr.orpg import apply_optimistic, build_orpg, reachable
from incgr.pddl import load_problem, parse_domain, parse_problem, serialize_domain
from incgr.recognition import recognize

__version__ = "0.1.0"
