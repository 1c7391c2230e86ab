"""Test suite for cpa-photonics."""
