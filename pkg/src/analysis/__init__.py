"""Reconstruction metrics and experiment sweeps."""
