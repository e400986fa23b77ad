"""Concrete syntax for both calculi and for corpus files.

Source programs::

    def C(x) = x.(1/2: ok + 1/2: C<x>)
    tau.(1/8: P + 7/8: Q) | ('a.(1: 0))\\{a} | R[a->b]

Target processes::

    new t. t!{1/8 1(): P, 7/8 2(): Q} | t?{1(): P, 2(): Q} | !c(x).x!<x>.0

Bare identifiers are opaque leaves in both languages.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .. import pccs, ppi


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_PUNCT = ["->", "(", ")", "{", "}", "<", ">", "[", "]", ",", ":", ".", "|", "+",
          "'", "\\", "/", "!", "?", "="]


def _tokenizer(name_pattern: str):
    patterns = [
        ("ws", r"[ \t\r]+"),
        ("nl", r"\n"),
        ("comment", r"%[^\n]*"),
        ("number", r"\d+(?:\.\d+)?"),
        ("name", name_pattern),
        ("punct", "|".join(re.escape(p) for p in _PUNCT)),
    ]
    master = re.compile("|".join(f"(?P<{k}>{p})" for k, p in patterns))

    def tokenize(text: str) -> list:
        tokens = []
        line, line_start, pos = 1, 0, 0
        while pos < len(text):
            m = master.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            if kind == "nl":
                line, line_start = line + 1, m.end()
            elif kind not in ("ws", "comment"):
                tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
            pos = m.end()
        tokens.append(Token("eof", "", line, pos - line_start + 1))
        return tokens

    return tokenize


_pccs_tokens = _tokenizer(r"[A-Za-z_][A-Za-z0-9_]*")
_ppi_tokens = _tokenizer(r"[A-Za-z_#~][A-Za-z0-9_#~']*")

_PCCS_KEYWORDS = {"def", "tau", "ok"}
_PPI_KEYWORDS = {"new", "ok"}


class _Parser:
    keywords: set = set()

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def lookahead(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def error(self, message: str, token: Token | None = None):
        token = token or self.peek
        raise ParseError(message, token.line, token.column)

    def advance(self) -> Token:
        token = self.peek
        self.pos += 1
        return token

    def at(self, text: str) -> bool:
        tok = self.peek
        return tok.kind in ("punct", "name") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.peek.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def name(self, what: str = "a name") -> str:
        tok = self.peek
        if tok.kind != "name" or tok.text in self.keywords:
            self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        return self.advance().text

    def names(self, close: str) -> tuple:
        out = []
        if not self.at(close):
            out.append(self.name())
            while self.accept(","):
                out.append(self.name())
        self.expect(close)
        return tuple(out)

    def number(self) -> Fraction:
        tok = self.peek
        if tok.kind != "number":
            self.error(f"expected a number, found {tok.text or 'end of input'!r}")
        self.advance()
        value = Fraction(tok.text)
        if self.accept("/"):
            den = self.peek
            if den.kind != "number" or "." in den.text:
                self.error("expected an integer denominator")
            self.advance()
            if int(den.text) == 0:
                self.error("zero denominator", den)
            value /= int(den.text)
        return value

    def end(self):
        if self.peek.kind != "eof":
            self.error(f"unexpected {self.peek.text!r}")


class _PccsParser(_Parser):
    keywords = _PCCS_KEYWORDS

    def program(self) -> pccs.SourceProgram:
        defs = []
        seen = {}
        while self.at("def"):
            start = self.advance()
            name = self.name("a constant identifier")
            if name in seen:
                self.error(f"duplicate definition of {name}", start)
            self.expect("(")
            params = self.names(")")
            self.expect("=")
            body = self.process()
            try:
                seen[name] = pccs.Definition(params, body)
            except ValueError as exc:
                self.error(str(exc), start)
            defs.append(name)
        term = self.process()
        self.end()
        return pccs.SourceProgram(term, pccs.DefEnv(seen))

    def process(self) -> pccs.Process:
        left = self.postfix()
        while self.accept("|"):
            left = pccs.Par(left, self.postfix())
        return left

    def postfix(self) -> pccs.Process:
        proc = self.atom()
        while True:
            if self.at("\\"):
                start = self.advance()
                self.expect("{")
                names = self.names("}")
                if not names:
                    self.error("restriction needs at least one name", start)
                proc = pccs.Restrict(proc, frozenset(names))
            elif self.accept("["):
                pairs = []
                if not self.at("]"):
                    pairs.append(self.rename())
                    while self.accept(","):
                        pairs.append(self.rename())
                self.expect("]")
                sources = [a for a, _ in pairs]
                if len(set(sources)) != len(sources):
                    self.error("a relabelling maps each name at most once")
                proc = pccs.Relabel(proc, tuple(pairs))
            else:
                return proc

    def rename(self) -> tuple:
        a = self.name()
        self.expect("->")
        return a, self.name()

    def atom(self) -> pccs.Process:
        tok = self.peek
        if tok.kind == "number" and tok.text == "0":
            self.advance()
            return pccs.Inert()
        if self.accept("ok"):
            return pccs.Success()
        if self.accept("("):
            proc = self.process()
            self.expect(")")
            return proc
        if self.at("tau"):
            self.advance()
            return self.choice(pccs.Action(pccs.TAU), tok)
        if self.accept("'"):
            return self.choice(pccs.Action(pccs.OUT, self.name()), tok)
        if tok.kind == "name" and tok.text not in self.keywords:
            following = self.lookahead()
            if following.text == ".":
                self.advance()
                return self.choice(pccs.Action(pccs.IN, tok.text), tok)
            if following.text == "<":
                self.advance()
                self.advance()
                return pccs.Call(tok.text, self.names(">"))
            self.advance()
            return pccs.Stub(tok.text)
        self.error(f"expected a process, found {tok.text or 'end of input'!r}")

    def choice(self, guard, start: Token) -> pccs.Process:
        self.expect(".")
        self.expect("(")
        branches = [self.branch()]
        while self.accept("+"):
            branches.append(self.branch())
        self.expect(")")
        total = sum((p for p, _ in branches), Fraction(0))
        if total != 1:
            self.error(f"probabilities sum to {total}", start)
        if any(p <= 0 for p, _ in branches):
            self.error("probabilities must be positive", start)
        return pccs.Choice(guard, tuple(branches))

    def branch(self) -> tuple:
        prob = self.number()
        self.expect(":")
        return prob, self.process()


class _PpiParser(_Parser):
    keywords = _PPI_KEYWORDS

    def process(self) -> ppi.Process:
        left = self.unary()
        while self.accept("|"):
            left = ppi.Par(left, self.unary())
        return left

    def unary(self) -> ppi.Process:
        if self.accept("new"):
            name = self.name()
            self.expect(".")
            return ppi.Restrict(name, self.process())
        return self.atom()

    def continuation(self) -> ppi.Process:
        if self.accept("("):
            proc = self.process()
            self.expect(")")
            return proc
        return self.atom()

    def atom(self) -> ppi.Process:
        tok = self.peek
        if tok.kind == "number" and tok.text == "0":
            self.advance()
            return ppi.Nil()
        if self.accept("ok"):
            return ppi.Success()
        if self.accept("("):
            proc = self.process()
            self.expect(")")
            return proc
        if self.accept("!"):
            subject = self.name()
            self.expect("(")
            params = self.names(")")
            self.expect(".")
            return self.build(ppi.RepIn, subject, params, self.continuation(), tok)
        if tok.kind == "name" and tok.text not in self.keywords:
            subject = self.advance().text
            if self.accept("?"):
                if self.accept("{"):
                    return self.branching(subject, tok)
                self.expect("(")
                params = self.names(")")
                self.expect(".")
                return self.build(ppi.InPrefix, subject, params, self.continuation(), tok)
            if self.accept("!"):
                if self.accept("{"):
                    return self.selecting(subject, tok)
                self.expect("<")
                args = self.names(">")
                self.expect(".")
                return ppi.OutPrefix(subject, args, self.continuation())
            return ppi.Stub(subject)
        self.error(f"expected a process, found {tok.text or 'end of input'!r}")

    def build(self, cls, *args):
        *fields, start = args
        try:
            return cls(*fields)
        except ValueError as exc:
            self.error(str(exc), start)

    def index(self) -> int:
        tok = self.peek
        if tok.kind != "number" or "." in tok.text:
            self.error("expected a branch index")
        return int(self.advance().text)

    def branching(self, subject, start) -> ppi.Process:
        branches = []
        while True:
            i = self.index()
            self.expect("(")
            params = self.names(")")
            self.expect(":")
            branches.append((i, params, self.process()))
            if not self.accept(","):
                break
        self.expect("}")
        return self.build(ppi.BranchIn, subject, tuple(branches), start)

    def selecting(self, subject, start) -> ppi.Process:
        branches = []
        while True:
            prob = self.number()
            i = self.index()
            self.expect("(")
            args = self.names(")")
            self.expect(":")
            branches.append((i, prob, args, self.process()))
            if not self.accept(","):
                break
        self.expect("}")
        total = sum((b[1] for b in branches), Fraction(0))
        if total != 1:
            self.error(f"probabilities sum to {total}", start)
        return self.build(ppi.SelectOut, subject, tuple(branches), start)


def parse_pccs(text: str) -> pccs.SourceProgram:
    """Parse definitions followed by a main term."""
    return _PccsParser(_pccs_tokens(text)).program()


def parse_pccs_process(text: str) -> pccs.Process:
    parser = _PccsParser(_pccs_tokens(text))
    proc = parser.process()
    parser.end()
    return proc


def parse_ppi(text: str) -> ppi.Process:
    parser = _PpiParser(_ppi_tokens(text))
    proc = parser.process()
    parser.end()
    return proc


def pretty(term) -> str:
    """Text for a term of either calculus, or for a source program."""
    if isinstance(term, pccs.SourceProgram):
        return str(term)
    if isinstance(term, pccs.Process):
        return pccs.pretty(term)
    if isinstance(term, ppi.Process):
        return ppi.pretty(term)
    raise TypeError(f"cannot print {term!r}")


# ---------------------------------------------------------------- corpora

@dataclass(frozen=True)
class CorpusEntry:
    name: str
    text: str
    program: pccs.SourceProgram
    line: int


def parse_corpus(text: str) -> list:
    """Entries start with a ``=== name`` header; ``%`` starts a comment line."""
    entries = []
    names = set()
    current = None
    body: list = []

    def flush():
        if current is None:
            if "".join(body).strip():
                raise ParseError("text before the first entry header", 1, 1)
            return
        name, line = current
        source = "".join(body)
        try:
            program = parse_pccs(source)
        except ParseError as exc:
            raise ParseError(f"in entry {name}: {exc.message}",
                             exc.line + line, exc.column) from None
        entries.append(CorpusEntry(name, source.strip(), program, line))

    for number, raw in enumerate(text.splitlines(keepends=True), 1):
        if raw.startswith("==="):
            flush()
            name = raw[3:].strip()
            if not name:
                raise ParseError("entry header without a name", number, 1)
            if name in names:
                raise ParseError(f"duplicate entry name {name}", number, 4)
            names.add(name)
            current, body = (name, number), []
        elif raw.lstrip().startswith("%"):
            body.append("\n")
        else:
            body.append(raw)
    flush()
    return entries
