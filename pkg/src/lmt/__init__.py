"""The lambda-mu calculus with primitive recursion at all finite types."""

__version__ = "0.1.0"
