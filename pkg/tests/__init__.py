"""Tests for collective-discord."""
