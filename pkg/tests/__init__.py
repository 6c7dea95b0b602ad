"""Test package for AI Financial Agent."""
