"""Plane-wave cold-plasma electrodynamics: zero-density motion, first-order density correction and slingshot estimates."""
