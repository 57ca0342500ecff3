"""Tests for the adaptive_consensus package."""
