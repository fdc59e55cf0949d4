"""Outage analysis of fluid-antenna multiple-access wireless-powered networks."""

__version__ = "0.1.0"
