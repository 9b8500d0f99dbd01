"""Supported pre-trained speech encoders.

Short ids map to Hugging Face checkpoints: the robust wav2vec 2.0 tuned
on affective speech, the multilingual XLS-R / XLSR families, and their
English and Spanish fine-tunes (matching the corpus languages).
"""

from __future__ import annotations

ROSTER: dict[str, str] = {
    "wav2vec2": "audeering/wav2vec2-large-robust-12-ft-emotion-msp-dim",
    "xlsr53": "facebook/wav2vec2-large-xlsr-53",
    "xlsr53-en": "jonatasgrosman/wav2vec2-large-xlsr-53-english",
    "xlsr53-sp": "jonatasgrosman/wav2vec2-large-xlsr-53-spanish",
    "xlsr-300m": "facebook/wav2vec2-xls-r-300m",
    "xlsr-1b": "facebook/wav2vec2-xls-r-1b",
    "xlsr-1b-en": "jonatasgrosman/wav2vec2-xls-r-1b-english",
    "xlsr-1b-sp": "jonatasgrosman/wav2vec2-xls-r-1b-spanish",
    "xlsr-2b": "facebook/wav2vec2-xls-r-2b",
}
