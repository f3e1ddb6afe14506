"""Tests for Modal LMMSE."""
