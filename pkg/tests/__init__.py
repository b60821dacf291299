"""Tests for tencomp."""
