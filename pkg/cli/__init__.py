"""Command-line front end; ``run(argv)`` returns the exit code."""

__all__ = ["run"]


def run(*args, **kwargs):
    from .main import run as _impl
    return _impl(*args, **kwargs)
