"""Configuration and logging utilities for plgroup."""
