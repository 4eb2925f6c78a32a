"""Tests for the tetragon engine."""
