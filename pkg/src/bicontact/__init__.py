"""bicontact: chart-local numerical workbench for pairs of contact forms."""

__version__ = "0.1.0"
