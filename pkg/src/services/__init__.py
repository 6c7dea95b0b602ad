"""Reconstruction algorithms: graph arithmetic, attacks and co-square handling."""
