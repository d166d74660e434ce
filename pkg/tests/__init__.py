"""Test suite for kgsense."""
