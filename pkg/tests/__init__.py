"""Test package for driftwos."""
