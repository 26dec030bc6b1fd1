"""Cost-optimal spaceport site selection and launch-mission allocation."""

__version__ = "0.1.0"
