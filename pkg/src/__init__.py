"""Faedo-Galerkin simulator and verification harness for stochastic Navier-Stokes with Levy noise"""

__version__ = "1.0.0"
