"""Similarity-controlled counterfactual datasets and grounding approximation analysis."""

__version__ = "0.1.0"
