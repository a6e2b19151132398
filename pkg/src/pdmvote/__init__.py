"""Predictive-maintenance classification toolkit: AI4I loading, SMOTE, native
learners, a five-member bootstrap majority-vote ensemble, metrics and TOPSIS."""

__version__ = "0.1.0"
