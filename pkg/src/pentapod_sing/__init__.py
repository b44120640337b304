"""Singularity analysis of linear pentapods."""
