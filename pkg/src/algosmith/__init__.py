"""algosmith: search for algorithms by sampling, evaluating, and evolving them."""

__version__ = "0.1.0"
