"""Warped-product metrics, their curvature functionals, and surgery constructions."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("metricsurgery")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
