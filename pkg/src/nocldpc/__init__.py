"""Toolchain for a fully flexible NoC-based LDPC decoder.

Decodes arbitrary LDPC codes with layered normalized min-sum, maps parity
checks onto a torus of processing elements, cycle-accurately simulates the
message traffic to derive static routing and PE memory configurations, sizes
reconfiguration buffers, and measures BER / iteration statistics.
"""

__version__ = "0.1.0"
