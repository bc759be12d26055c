"""Tests for loopshaped-mpc."""
