"""Ore extensions, their division rings, and free-subgroup verification."""
