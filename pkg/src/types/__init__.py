"""Type definitions for the toolkit"""
