"""Tests for thc-transitions."""
