"""SPH debris-flow workbench: case authoring, desk-scale solver, validation,
post-processing tools, a human-in-the-loop session service, and an evaluation kit."""

__version__ = "0.1.0"
