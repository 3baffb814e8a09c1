"""Test package for kgo-heun."""
