"""Onboard plume dynamic targeting: segment, denoise, plan, evaluate."""
