"""Line-aware tokenizer for ``.ssm`` documents."""
from __future__ import annotations

import re
from typing import Iterator, List, NamedTuple

from algebra.errors import FormatSyntaxError

__all__ = ["Token", "tokenize", "SYMBOLS"]

SYMBOLS = "[],:;'=+-*/^()"

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[\[\],:;'=+\-*/^()]))")


class Token(NamedTuple):
    kind: str  # "int", "name", "sym", "newline" or "eof"
    text: str
    line: int
    column: int

    def describe(self) -> str:
        if self.kind == "newline":
            return "end of line"
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def _line_tokens(text: str, lineno: int) -> Iterator[Token]:
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if m is None or m.end() == pos:
            col = pos + len(stripped[pos:]) - len(stripped[pos:].lstrip()) + 1
            raise FormatSyntaxError(lineno, col, repr(stripped[col - 1]), ("INT", "NAME", "symbol"))
        kind = m.lastgroup
        value = m.group(kind)
        yield Token(kind, value, lineno, m.start(kind) + 1)
        pos = m.end()


def tokenize(source: str) -> List[Token]:
    """Tokens of every statement line; ``#`` starts a comment, CR is ignored."""
    tokens: List[Token] = []
    lineno = 0
    for lineno, raw in enumerate(source.split("\n"), start=1):
        line = raw.replace("\r", "")
        line = line.split("#", 1)[0]
        line_tokens = list(_line_tokens(line, lineno))
        if line_tokens:
            tokens.extend(line_tokens)
            tokens.append(Token("newline", "", lineno, len(line.rstrip()) + 1))
    tokens.append(Token("eof", "", max(lineno, 1), 1))
    return tokens
