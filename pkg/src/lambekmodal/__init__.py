"""Workbench for the distributive full Lambek calculus with modalities."""
