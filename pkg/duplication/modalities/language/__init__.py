"""Binary language proximity."""
