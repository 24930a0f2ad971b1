"""
Version information for flowmut
Recorded in every report; bump together with CHANGELOG.md
"""

__version__ = "0.4.0"
