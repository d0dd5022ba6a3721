"""Parse, lint, align and score gender-tagged bilingual corpora."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
