"""Cumulative residual interval entropy of doubly truncated random variables."""
