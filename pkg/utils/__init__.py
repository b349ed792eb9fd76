"""
Utilities package for the Kleinian group toolkit.
Contains Mobius maps, circle space, words and the batch runner.
"""
