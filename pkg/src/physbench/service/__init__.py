"""HTTP service exposing the generate/fit/predict/evaluate pipeline."""

from physbench.service.app import create_app

__all__ = ["create_app"]
