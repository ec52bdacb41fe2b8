"""Exact Chebotarev invariants of small finite groups."""

__version__ = "0.1.0"
