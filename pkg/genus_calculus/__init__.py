"""Partitioned genus distributions, production tables and the engine"""
