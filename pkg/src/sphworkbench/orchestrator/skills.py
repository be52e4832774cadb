"""Curated context snippets handed to the planner on every call."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..postproc.registry import tool_descriptors

__all__ = ["SkillContext", "default_skills"]

XML_REFERENCE = """Case document reference (all units SI, angles in degrees):
<case dimensionality="2|3">
  <gravity x= y= z= />
  <geometry>
    <box|fill_region|plane_wall role="fluid|fixed_boundary|floating_body"
         group=INT [layers=INT] [mass_density=NUM] [wetted="+|-"]>
      <origin x= y= z= />
      <rotate axis="x|y|z" angle=DEG />   (zero or more, applied in order)
      <extents x= y= z= />
    </...>
  </geometry>
  <materials>
    <material group=INT rho0= mu= n= tau_y= m= />
  </materials>
  <numerics dp= cs= alpha= cfl= h_coef= />
  <controls t_end= output_interval= seed= />
</case>
2D cases live in the x-z plane: zero y extents, y origins, y gravity;
rotations about y only.  plane_wall has exactly one zero extent (its
normal); wetted picks which side faces the fluid."""

BOUNDARY_RULE = """Boundary thickness rule: walls need at least
ceil(2 * h_coef * sqrt(dimensionality)) particle layers (kernel support
2h with h = h_coef * dp * sqrt(dimensionality)); single-layer walls
truncate the kernel support of near-wall fluid and leak."""

LOCAL_FRAME_RULE = """Inclined geometry rule: define geometry on a slope in
the slope-aligned local frame (axis-aligned extents) and rotate the frame
into global coordinates with <rotate>; composition is rotate first, then
translate by <origin>.  Never approximate a rotated box with an
axis-aligned one."""


@dataclass(frozen=True)
class SkillContext:
    version: str
    snippets: dict[str, str] = field(default_factory=dict)

    def render(self) -> str:
        parts = [f"[skills v{self.version}]"]
        for name, text in self.snippets.items():
            parts.append(f"--- {name} ---\n{text}")
        return "\n".join(parts)


def default_skills() -> SkillContext:
    return SkillContext(
        version="1",
        snippets={
            "xml_reference": XML_REFERENCE,
            "boundary_layers": BOUNDARY_RULE,
            "local_frames": LOCAL_FRAME_RULE,
            "analysis_tools": json.dumps(tool_descriptors(), indent=1),
        })
