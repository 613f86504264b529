"""Simulator and ground control for mobile robots surveying UHF RFID sensor tags.

A mission puts a UAV or UGV with a reader antenna into a field of battery-free
tags. The simulator models the radio link that powers and reads each tag, the
vehicle kinematics, the onboard search behaviors, and the telemetry protocol
between vehicle and ground control, all as a pure function of the scenario and
a seed.
"""

__version__ = "0.1.0"
