"""
Unified complexity toolkit for finite learning problems
"""
