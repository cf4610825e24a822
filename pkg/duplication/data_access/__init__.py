"""File-format readers and writers for pipeline artifacts."""
