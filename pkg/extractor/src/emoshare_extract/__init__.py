"""Offline audio -> feature-CSV extraction with pre-trained speech encoders."""

from .extract import ExtractorJob, ExtractResult, extract, load_manifest
from .roster import ROSTER
from .errors import AudioError, ExtractorError, ManifestError

__version__ = "0.1.0"

__all__ = [
    "AudioError",
    "ExtractorError",
    "ExtractorJob",
    "ExtractResult",
    "ManifestError",
    "ROSTER",
    "extract",
    "load_manifest",
]
