"""Exact arithmetic and group constructions for plgroup."""
