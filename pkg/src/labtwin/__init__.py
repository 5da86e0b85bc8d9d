"""labtwin: point-cloud virtual laboratory pipeline, engine, and server."""

__version__ = "0.1.0"
