"""Programmable coherent perfect absorption on MZI meshes.

Compiles port-symmetric lossy beam splitters into ancilla-dilated unitary
Mach-Zehnder mesh programs and simulates single-photon and two-photon NOON
absorption experiments on them.
"""

__version__ = "0.1.0"
