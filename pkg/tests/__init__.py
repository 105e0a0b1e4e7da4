"""Test suite for Steinberg Lab"""
