"""Expression grammar: infix arithmetic over jet-space symbols.

Precedence, lowest first: + -, * /, unary -, ^ (right associative).
Function call syntax is reserved for exp, ln, sin and cos.  Numeric
literals are integers; ratios like 3/4 read as exact division.  A
power with a non-rational exponent is rewritten as exp(g*ln(f)).
"""

from __future__ import annotations

from . import expr as ex

FUNCTIONS = {"exp": ex.exp, "ln": ex.ln, "sin": ex.sin, "cos": ex.cos}

_OPS = set("+-*/^(),[]")


class ParseError(ex.ExprError):
    def __init__(self, message, text, pos):
        self.pos = pos
        super().__init__(f"{message} (at position {pos}: "
                         f"...{text[max(0, pos - 12):pos]}<HERE>{text[pos:pos + 12]})")


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append((c, c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", text, i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text, space):
        self.text = text
        self.space = space
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}",
                             self.text, tok[2])
        self.pos += 1
        return tok

    def parse(self):
        e = self.sum_()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return e

    def sum_(self):
        e = self.product()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.product()
            e = e + rhs if op == "+" else e - rhs
        return e

    def product(self):
        e = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        self.take()
        exponent = self.unary()  # right associative, unary minus allowed
        e_norm = ex.normalize(exponent)
        if e_norm.kind == ex.NUM:
            return ex.power(base, e_norm.data)
        return ex.exp(exponent * ex.ln(base))

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return ex.num(int(value))
        if kind == "(":
            self.take()
            e = self.sum_()
            self.take(")")
            return e
        if kind == "ident":
            self.take()
            if value in FUNCTIONS and self.peek()[0] == "(":
                self.take("(")
                arg = self.sum_()
                self.take(")")
                return FUNCTIONS[value](arg)
            if self.peek()[0] == "[":
                self.take("[")
                entries = [int(self.take("int")[1])]
                while self.peek()[0] == ",":
                    self.take(",")
                    entries.append(int(self.take("int")[1]))
                self.take("]")
                try:
                    return ex.sym(self.space.jet_by_entries(value, entries))
                except KeyError as err:
                    raise ParseError(str(err), self.text, pos)
            try:
                return ex.sym(self.space.resolve(value))
            except KeyError:
                raise ParseError(f"unknown symbol {value!r}", self.text, pos)
        raise ParseError(f"unexpected {value!r}", self.text, pos)


def parse(text, space):
    """Parse an expression string against a jet space's symbols."""
    return _Parser(text, space).parse()


def render(e):
    """Normalized, re-parseable string; round trips through parse."""
    return ex.render(e)
