"""
Services package for the Kleinian group toolkit.
Contains group families, chain checks, domains, rendering and CLI support.
"""
