"""Theories with constraints in interpretation: models, condition posets,
derivatives and the forcing encoder, computed exhaustively at finite scale."""

__version__ = "0.1.0"
