"""Data models for Steinberg Lab

This module defines data models for:
- RunConfig: Validated CLI parameters
- ReportRecord: One machine-readable result row
"""
from .report import ReportRecord
from .run_config import RunConfig

__all__ = ["ReportRecord", "RunConfig"]
