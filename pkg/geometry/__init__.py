"""Semi-atlas, semi-bundle and semi-homotopy checkers."""

__all__ = [
    "check_atlas",
    "check_bundle",
    "check_homotopy",
    "semigroup_at",
]


def check_atlas(*args, **kwargs):
    from .checks import check_atlas as _impl
    return _impl(*args, **kwargs)


def check_bundle(*args, **kwargs):
    from .checks import check_bundle as _impl
    return _impl(*args, **kwargs)


def check_homotopy(*args, **kwargs):
    from .checks import check_homotopy as _impl
    return _impl(*args, **kwargs)


def semigroup_at(*args, **kwargs):
    from .semiatlas import tower_semigroup as _impl
    return _impl(*args, **kwargs)
