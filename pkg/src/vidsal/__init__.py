"""Video saliency ensemble toolkit."""
__version__ = "0.1.0"
