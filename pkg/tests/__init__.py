"""Test suite for the eqrf package."""
