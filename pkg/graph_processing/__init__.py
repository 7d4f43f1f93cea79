"""Multigraphs, block structure and dmt-string decomposition"""
