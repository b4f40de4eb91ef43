"""Test suite for pilotkey."""
