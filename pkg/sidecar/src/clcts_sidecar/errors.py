"""Exception types shared across the sidecar."""


class SidecarError(ValueError):
    """Invalid input data or flags; messages name the file and line."""


class BackendUnavailable(RuntimeError):
    """A model backend cannot be loaded; the message says how to fix it."""
