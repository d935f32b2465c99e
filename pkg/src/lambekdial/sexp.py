"""Minimal S-expression reader and writer.

Atoms are bare symbols (strings); lists are Python lists.  Used for the
canonical serialisation of formulas, terms, sequents and derivations.
"""

import re

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


class SexpError(ValueError):
    pass


def dumps(x):
    if isinstance(x, (list, tuple)):
        return "(" + " ".join(dumps(y) for y in x) + ")"
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    s = str(x)
    if not s or any(c in s for c in "() \t\n"):
        raise SexpError(f"cannot write symbol {s!r}")
    return s


def loads(text):
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SexpError(f"bad character at {pos}")
        tokens.append((m.group(1) or m.group(2) or m.group(3), m.start()))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    value, i = _read(tokens, 0)
    if i != len(tokens):
        raise SexpError(f"trailing input at {tokens[i][1]}")
    return value


def _read(tokens, i):
    if i >= len(tokens):
        raise SexpError("unexpected end of input")
    tok, at = tokens[i]
    if tok == "(":
        out = []
        i += 1
        while True:
            if i >= len(tokens):
                raise SexpError("unclosed '('")
            if tokens[i][0] == ")":
                return out, i + 1
            item, i = _read(tokens, i)
            out.append(item)
    if tok == ")":
        raise SexpError(f"unexpected ')' at {at}")
    return tok, i + 1
