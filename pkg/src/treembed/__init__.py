"""Low-distortion lp embeddings of weighted trees via caterpillar colourings."""
__version__ = "0.1.0"
