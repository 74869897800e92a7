"""Time-Floquet wave-based extreme learning machine and reservoir computer."""
__version__ = "0.1.0"
