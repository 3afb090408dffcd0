"""pyspeedup tests package."""
