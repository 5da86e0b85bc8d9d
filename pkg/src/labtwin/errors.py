"""Exception taxonomy mirrored by the CLI exit codes."""


class LabTwinError(Exception):
    """Base for all labtwin failures."""


class ValidationError(LabTwinError):
    """Malformed input, broken invariant, or failed integrity check (exit 1)."""


class ResourceError(LabTwinError):
    """I/O failure or an exceeded memory/disk budget (exit 2)."""
