"""Test suite for the ergolab experiment laboratory"""
