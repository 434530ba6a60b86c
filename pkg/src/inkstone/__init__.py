"""Generative calligraphy engine.

Turns recorded body movement into simulated ink, extracts brush strokes,
captions each gesture bilingually, composes glyphs onto calligraphic pages,
and archives full pages into an append-only book. See the README for the
CLI and the realtime server.
"""

__version__ = "0.1.0"
