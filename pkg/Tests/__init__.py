"""
Affine Quiver Tests Package

One unittest suite per consolidated tool plus the command line and server suites.
Shared quivers and representations live in fixtures.py and data/.
"""
