"""
Test Suite Package - Krein Dichotomy Toolkit
Organized testing infrastructure, one phase per toolkit layer.
"""

__version__ = "1.0.0"
__author__ = "Krein Dichotomy Team"
