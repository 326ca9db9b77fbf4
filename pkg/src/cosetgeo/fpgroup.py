"""Free-group words and finitely presented group input.

A word is a tuple of signed generator indices (1-based): ``(1, -2)`` is
a*B where B stands for b^-1.  Presentations use the compact text form::

    a,b | aBab^2aBab^3, a^4bAb

Lowercase letters are generators, uppercase letters their inverses, and
``^n`` repeats the preceding letter or parenthesized subword (a negative
exponent inverts first).
"""

from __future__ import annotations

from dataclasses import dataclass

Word = tuple[int, ...]


class ParseError(ValueError):
    """Malformed presentation or word text; ``position`` is 1-based."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def free_reduce(letters) -> Word:
    """Cancel adjacent x, x^-1 pairs; the result is the unique reduced form."""
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_inverse(w) -> Word:
    return tuple(-x for x in reversed(w))


def word_concat(u, v) -> Word:
    return free_reduce(tuple(u) + tuple(v))


def cyclic_reduce(w) -> Word:
    """Freely reduce, then strip conjugating prefix/suffix pairs."""
    w = free_reduce(w)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


@dataclass(frozen=True)
class Presentation:
    """Generators (by single-letter name) plus freely reduced relator words."""

    names: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        if not self.names:
            raise ValueError("a presentation needs at least one generator")
        n = len(self.names)
        for r in self.relators:
            if not r:
                raise ValueError("relators must be non-empty")
            if r != free_reduce(r):
                raise ValueError(f"relator {r!r} is not freely reduced")
            for x in r:
                if x == 0 or abs(x) > n:
                    raise ValueError(f"letter {x} out of range in relator {r!r}")

    @property
    def generator_count(self) -> int:
        return len(self.names)

    def render(self) -> str:
        rels = ", ".join(render_word(r, self.names) for r in self.relators)
        return f"{','.join(self.names)} | {rels}"

    def __str__(self) -> str:
        return self.render()


def render_word(w, names) -> str:
    """Inverse of the word parser: runs of a letter collapse to ``x^n``."""
    out = []
    i = 0
    w = tuple(w)
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        letter = names[abs(w[i]) - 1]
        if w[i] < 0:
            letter = letter.upper()
        out.append(letter if j - i == 1 else f"{letter}^{j - i}")
        i = j
    return "".join(out)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def skip_ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else None

    def take(self):
        ch = self.peek()
        if ch is not None:
            self.i += 1
        return ch

    @property
    def pos(self) -> int:
        return self.i + 1


def _parse_int(sc: _Scanner) -> int:
    start = sc.pos
    sign = 1
    if sc.peek() == "-":
        sc.take()
        sign = -1
    digits = ""
    while sc.peek() is not None and sc.text[sc.i].isdigit():
        digits += sc.text[sc.i]
        sc.i += 1
    if not digits:
        raise ParseError("malformed exponent", start)
    return sign * int(digits)


def _parse_word(sc: _Scanner, gens: dict[str, int], stop: str) -> list[int]:
    letters: list[int] = []
    while True:
        ch = sc.peek()
        if ch is None or ch in stop:
            return letters
        if ch == "(":
            open_pos = sc.pos
            sc.take()
            atom = _parse_word(sc, gens, stop=")")
            if sc.peek() != ")":
                raise ParseError("unbalanced parenthesis", open_pos)
            sc.take()
            if not atom:
                raise ParseError("empty parenthesized subword", open_pos)
        elif ch.isalpha():
            pos = sc.pos
            sc.take()
            idx = gens.get(ch.lower())
            if idx is None:
                raise ParseError(f"unknown letter {ch!r}", pos)
            atom = [idx if ch.islower() else -idx]
        else:
            raise ParseError(f"unexpected character {ch!r}", sc.pos)
        if sc.peek() == "^":
            pos = sc.pos
            sc.take()
            n = _parse_int(sc)
            if n == 0:
                raise ParseError("exponent must be non-zero", pos)
            if n < 0:
                atom = [-x for x in reversed(atom)]
                n = -n
            letters.extend(atom * n)
        else:
            letters.extend(atom)


def _parse_generators(sc: _Scanner) -> dict[str, int]:
    gens: dict[str, int] = {}
    while True:
        ch = sc.peek()
        pos = sc.pos
        if ch is None:
            raise ParseError("expected '|' after the generator list", pos)
        if not (ch.isalpha() and ch.islower() and ch.isascii()):
            raise ParseError(f"expected a lowercase generator letter, got {ch!r}", pos)
        sc.take()
        if ch in gens:
            raise ParseError(f"duplicate generator {ch!r}", pos)
        gens[ch] = len(gens) + 1
        nxt = sc.peek()
        if nxt == ",":
            sc.take()
            continue
        if nxt == "|":
            sc.take()
            return gens
        raise ParseError("expected ',' or '|' in the generator list", sc.pos)


def parse_word_text(text: str, names) -> Word:
    """Parse a single word like ``aBab^2`` over the given generator names."""
    gens = {name: i + 1 for i, name in enumerate(names)}
    sc = _Scanner(text)
    letters = _parse_word(sc, gens, stop="")
    if sc.peek() is not None:
        raise ParseError(f"unexpected character {sc.peek()!r}", sc.pos)
    return free_reduce(letters)


def parse_presentation(text: str) -> Presentation:
    """Parse ``"a,b | w1, w2, ..."``; relators are stored freely reduced."""
    sc = _Scanner(text)
    gens = _parse_generators(sc)
    relators: list[Word] = []
    while sc.peek() is not None:
        pos = sc.pos
        letters = _parse_word(sc, gens, stop=",")
        word = free_reduce(letters)
        if not word:
            if letters:
                raise ParseError("relator reduces to the identity", pos)
            raise ParseError("empty relator", pos)
        relators.append(word)
        if sc.peek() == ",":
            sc.take()
            if sc.peek() is None:
                raise ParseError("trailing comma in the relator list", sc.pos)
    names = tuple(sorted(gens, key=gens.get))
    return Presentation(names=names, relators=tuple(relators))


def read_presentation_file(path) -> Presentation:
    """Load a presentation from a file; ``#`` starts a comment line."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                return parse_presentation(line)
    raise ParseError("no presentation found in file", 1)
