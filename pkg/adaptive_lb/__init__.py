"""
Adaptive Load Balancing Simulator
Discrete-time multi-agent multi-resource system with adaptive resource selection
"""

__version__ = "1.0.0"
