"""Citation and semantic network analysis of bibliographic corpora."""

__version__ = "0.1.0"
FORMAT_VERSION = 1
