from .series import TimeSeries, Selector, scalar_series, PRESETS, preset_series
from .walls import PlaneSpec, WallFace, infer_wall_face, AmbiguousFace, frame_dim
from .profile import surface_profile
from .partition import PartitionResult, partition_flow
from .flux import mass_flux
from .forces import ReactionForceResult, reaction_force, bending_moment, body_com_series
from .events import hit_time, NotReached
from .render import render_snapshot, UnknownField
from .errors import EmptySelection
from .registry import TOOLS, tool_descriptors, get_tool, run_tool, ToolError

__all__ = [
    "TimeSeries", "Selector", "scalar_series", "PRESETS", "preset_series",
    "PlaneSpec", "WallFace", "infer_wall_face", "AmbiguousFace", "frame_dim",
    "surface_profile",
    "PartitionResult", "partition_flow",
    "mass_flux",
    "ReactionForceResult", "reaction_force", "bending_moment", "body_com_series",
    "hit_time", "NotReached",
    "render_snapshot", "UnknownField",
    "EmptySelection",
    "TOOLS", "tool_descriptors", "get_tool", "run_tool", "ToolError",
]
