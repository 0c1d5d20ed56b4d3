"""Talk-corpus to knowledge-graph pipeline with goal synthesis and analytics."""

__version__ = "0.1.0"
