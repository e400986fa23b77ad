"""Text syntax and the ``probcorr`` command."""

from .main import build_parser, main, run
from .parsing import ParseError, parse_corpus, parse_pccs, parse_ppi, pretty

__all__ = ["ParseError", "build_parser", "main", "parse_corpus", "parse_pccs", "parse_ppi",
           "pretty", "run"]
