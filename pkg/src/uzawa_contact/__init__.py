"""Uzawa and accelerated Uzawa solvers for frictionless contact QPs."""
