"""IDL compiler and virtual-ABI runtime."""

__version__ = "0.1.0"
