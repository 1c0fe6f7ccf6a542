"""Sliding-window summarization toolkit for long meeting transcripts."""

__version__ = "0.1.0"
