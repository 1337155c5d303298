# ============================================================================
# INIT FILES FOR PACKAGE STRUCTURE
# ============================================================================

__version__ = '0.1.0'
__author__ = 'Krein Dichotomy Team'
