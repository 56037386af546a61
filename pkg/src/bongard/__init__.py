"""Bongard problem solving via turtle program synthesis and rule induction."""

__version__ = "0.1.0"
