"""Deterministic physics micro-environments with a rollout-evaluation harness.

The package is organized as a core library (environments, episode files,
predictors, scoring), a FastAPI service exposing the pipeline, and a thin
CLI client driving the service.
"""

__version__ = "0.1.0"
