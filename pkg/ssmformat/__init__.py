"""Reading and writing ``.ssm`` documents."""

from .parser import parse
from .serializer import serialize
from .build import build

__all__ = ["parse", "serialize", "build"]
