from __future__ import annotations


class ExtractorError(Exception):
    """Base class; also covers invalid jobs (unknown model, bad pooling)."""


class ManifestError(ExtractorError):
    """Malformed audio manifest."""


class AudioError(ExtractorError):
    """A single audio file could not be decoded or resampled."""
