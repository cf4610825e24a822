"""Proximity modalities: grapheme, semantic and language distances."""
