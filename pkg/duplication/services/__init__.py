"""Cross-modality services built on top of the modality packages."""
