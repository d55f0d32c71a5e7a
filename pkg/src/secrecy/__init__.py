"""Exact finite-alphabet secrecy notions, cipher synthesis and their relations."""
