"""Model-backed services for the counterfactual grounding pipeline."""

__version__ = "0.1.0"
