"""Shared models and utilities for Steinberg Lab"""
