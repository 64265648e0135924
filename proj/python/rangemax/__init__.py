"""Orthogonal range-maximum queries over points in rank space."""

from ._rangemax import FormatError, Index, PointSet

__all__ = ["FormatError", "Index", "PointSet"]
