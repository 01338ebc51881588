"""Design-rule checks for Eagle PCB schematics, boards and libraries."""

__version__ = "0.1.0"
