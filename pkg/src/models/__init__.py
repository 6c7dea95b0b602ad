"""Data models for graph reconstruction."""
