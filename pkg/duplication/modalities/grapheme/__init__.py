"""Grapheme (string-level) proximity."""
