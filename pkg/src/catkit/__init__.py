"""Second-order logic toolkit: syntax, transformations, finite semantics and categoricity checks."""

__version__ = "0.1.0"
