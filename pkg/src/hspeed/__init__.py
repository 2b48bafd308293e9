"""hspeed: exact computation with hereditary properties of relational structures."""

__version__ = "0.1.0"
