"""Provenance-graph distillation pipeline for benign-only APT detection."""
__version__ = "0.1.0"
