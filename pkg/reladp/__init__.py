"""Relative termination via annotated dependency pairs."""
