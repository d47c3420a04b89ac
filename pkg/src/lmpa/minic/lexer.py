"""Tokenizer for MiniC source text."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError

KEYWORDS = {"struct", "global", "fn", "let", "return", "if", "else"}

# Multi-character symbols first so `->` wins over `-`, `<=` over `<`.
SYMBOLS = ["->", "<=", ">=", "==", "!=", "{", "}", "(", ")", "<", ">", ";", ":", ",", "=", "&", "*"]


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'int' | 'keyword' | 'symbol' | 'eof'
    text: str
    line: int
    column: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_" or ch == "%"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if _is_ident_start(ch):
            start, start_col = i, col
            i += 1
            col += 1
            while i < n and _is_ident_char(source[i]):
                i += 1
                col += 1
            text = source[start:i]
            if text == "%":
                raise ParseError("stray '%'", line, start_col)
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, start_col))
            continue
        if ch.isdigit():
            start, start_col = i, col
            while i < n and source[i].isdigit():
                i += 1
                col += 1
            tokens.append(Token("int", source[start:i], line, start_col))
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token("symbol", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens
