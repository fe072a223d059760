"""Test suite of the sns-levy simulator and verification harness"""
