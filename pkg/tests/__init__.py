"""Test suite for the qosrate package."""
