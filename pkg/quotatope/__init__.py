"""
Topology of quota complexes and its arithmetic applications.
"""

__version__ = "1.0.0"
