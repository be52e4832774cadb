from .planner import (
    InputEnvelope,
    PlannerProposal,
    ToolChoice,
    PlannerInterface,
    ScriptedPlanner,
    HttpPlanner,
)
from .skills import SkillContext, default_skills
from .session import (
    Phase,
    Action,
    Event,
    SessionConfig,
    Session,
    start_session,
    hitl_turn,
    run_phase2,
    postproc_request,
)

__all__ = [
    "InputEnvelope", "PlannerProposal", "ToolChoice", "PlannerInterface",
    "ScriptedPlanner", "HttpPlanner",
    "SkillContext", "default_skills",
    "Phase", "Action", "Event", "SessionConfig", "Session",
    "start_session", "hitl_turn", "run_phase2", "postproc_request",
]
