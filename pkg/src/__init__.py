"""Rydberg EIT cross-Kerr toolkit - Source Package"""
