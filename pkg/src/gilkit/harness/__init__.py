"""Interpretations, generators, conformance suites and differential testers."""
