"""Integration test package."""
