"""Line-oriented workspace format for categories, functors and signatures.

Example::

    category K { objects A B; hom A B = f; identity A = idA }
    concrete K { carrier A = {a1 a2}; carrier B = {b}; action f = a1->b, a2->b }
    functor F : K -> K { obj A -> A; obj B -> B; mor f -> f }
    nat phi : F => F { at A = idA; at B = id_B }
    signature S over K { rel R/2 at A = {(a1,a2)} }

Statements inside braces end at ``;`` or a newline, ``#`` starts a comment,
and identifiers that are not bare words are written in double quotes.
Omitted identities default to ``id_<object>``; compositions with identities,
identity actions and identity images of functors are implied.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .concrete import ConcreteCategory, FinSetFunctor, validate_set_functor
from .core import (
    DEFAULT_HOM_CAP,
    FinCategory,
    Functor,
    NatTrans,
    check_hom_cap,
    validate_category,
    validate_functor,
    validate_nat,
)
from .signatures import RelationSymbol, Signature

KINDS = ("category", "concrete", "functor", "nat", "signature")
_BARE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.'@*+]*")
_PUNCT = ("->", "=>", "{", "}", "(", ")", ",", ";", "=", "/", ":")


class DSLError(Exception):
    """A diagnostic with a 1-based position and the set of expected tokens."""

    kind = "error"

    def __init__(self, message: str, line: int = 0, column: int = 0, expected: frozenset[str] = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        where = f"{line}:{column}: " if line else ""
        hint = f" (expected one of {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{where}{self.kind}: {message}{hint}")


class LexError(DSLError):
    kind = "lexical error"


class DSLSyntaxError(DSLError):
    kind = "syntax error"


class ResolutionError(DSLError):
    kind = "resolution error"


class LawError(DSLError):
    kind = "law error"


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "nl", "eof" or the punctuation itself
    text: str
    line: int
    column: int


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("nl", "\n", line, col))
            line, col, i = line + 1, 1, i + 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            start_col = col
            buf = []
            i += 1
            col += 1
            while True:
                if i >= n or text[i] == "\n":
                    raise LexError("unterminated quoted identifier", line, start_col, frozenset({'"'}))
                c = text[i]
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in _ESCAPES:
                        raise LexError("bad escape in quoted identifier", line, col, frozenset({'\\"', "\\\\", "\\n"}))
                    buf.append(_ESCAPES[text[i + 1]])
                    i += 2
                    col += 2
                    continue
                i += 1
                col += 1
                if c == '"':
                    break
                buf.append(c)
            tokens.append(Token("id", "".join(buf), line, start_col))
            continue
        m = _BARE.match(text, i)
        if m:
            tokens.append(Token("id", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


def quote(name: str) -> str:
    if _BARE.fullmatch(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


# ------------------------------------------------------------------ AST


@dataclass
class _Decl:
    kind: str
    name: str
    token: Token
    header: dict = field(default_factory=dict)
    body: list = field(default_factory=list)  # (keyword token, payload)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def skip_nl(self):
        while self.cur.kind == "nl":
            self.pos += 1

    def expect(self, *kinds: str) -> Token:
        t = self.cur
        if t.kind not in kinds:
            exp = frozenset("identifier" if k == "id" else ("newline" if k == "nl" else k) for k in kinds)
            shown = t.text if t.kind != "eof" else "end of input"
            raise DSLSyntaxError(f"unexpected {shown!r}", t.line, t.column, exp)
        self.pos += 1
        return t

    def keyword(self, *words: str) -> Token:
        t = self.cur
        if t.kind != "id" or t.text not in words:
            shown = t.text if t.kind != "eof" else "end of input"
            raise DSLSyntaxError(f"unexpected {shown!r}", t.line, t.column, frozenset(words))
        self.pos += 1
        return t

    def ident(self) -> str:
        return self.expect("id").text

    def parse(self) -> list[_Decl]:
        decls = []
        while True:
            self.skip_nl()
            if self.cur.kind == "eof":
                return decls
            decls.append(self.decl())

    def decl(self) -> _Decl:
        t = self.keyword(*KINDS)
        d = _Decl(t.text, self.ident(), t)
        if d.kind in ("functor", "nat"):
            self.expect(":")
            d.header["source"] = self.expect("id")
            self.expect("->" if d.kind == "functor" else "=>")
            d.header["target"] = self.expect("id")
        elif d.kind == "signature":
            self.keyword("over")
            d.header["over"] = self.expect("id")
        self.skip_nl()
        self.expect("{")
        while True:
            while self.cur.kind in ("nl", ";"):
                self.pos += 1
            if self.cur.kind == "}":
                self.pos += 1
                break
            d.body.append(self.statement(d.kind))
            if self.cur.kind not in ("nl", ";", "}"):
                self.expect("nl", ";", "}")
        return d

    def _ids_until_end(self) -> list[Token]:
        out = []
        while self.cur.kind == "id":
            out.append(self.cur)
            self.pos += 1
        return out

    def statement(self, kind: str):
        if kind == "category":
            kw = self.keyword("objects", "hom", "compose", "identity")
            if kw.text == "objects":
                return kw, self._ids_until_end()
            if kw.text == "hom":
                a, b = self.expect("id"), self.expect("id")
                self.expect("=")
                return kw, (a, b, self._ids_until_end())
            if kw.text == "compose":
                g, f = self.expect("id"), self.expect("id")
                self.expect("=")
                return kw, (g, f, self.expect("id"))
            a = self.expect("id")
            self.expect("=")
            return kw, (a, self.expect("id"))
        if kind == "concrete":
            kw = self.keyword("carrier", "action")
            target = self.expect("id")
            self.expect("=")
            if kw.text == "carrier":
                self.expect("{")
                elems = []
                while self.cur.kind in ("id", ","):
                    if self.cur.kind == "id":
                        elems.append(self.cur)
                    self.pos += 1
                self.expect("}")
                return kw, (target, elems)
            pairs = []
            while self.cur.kind == "id":
                x = self.expect("id")
                self.expect("->")
                pairs.append((x, self.expect("id")))
                if self.cur.kind != ",":
                    break
                self.pos += 1
            return kw, (target, pairs)
        if kind == "functor":
            kw = self.keyword("obj", "mor")
            x = self.expect("id")
            self.expect("->")
            return kw, (x, self.expect("id"))
        if kind == "nat":
            kw = self.keyword("at")
            a = self.expect("id")
            self.expect("=")
            return kw, (a, self.expect("id"))
        kw = self.keyword("rel")
        r = self.expect("id")
        self.expect("/")
        n = self.expect("id")
        if not n.text.isdigit() or int(n.text) < 1:
            raise DSLSyntaxError("arity must be a positive integer", n.line, n.column, frozenset({"integer"}))
        if self.cur.kind == "id" and self.cur.text == "at":
            self.pos += 1
            a = self.expect("id")
            self.expect("=")
            self.expect("{")
            tuples = []
            while True:
                while self.cur.kind == ",":
                    self.pos += 1
                if self.cur.kind == "}":
                    self.pos += 1
                    break
                start = self.expect("(")
                items = [self.expect("id")]
                while self.cur.kind == ",":
                    self.pos += 1
                    items.append(self.expect("id"))
                self.expect(")")
                tuples.append((start, items))
            return kw, (r, n, a, tuples)
        return kw, (r, n, None, [])


# ------------------------------------------------------------ workspace


@dataclass
class Workspace:
    """Named declarations; concrete structures are keyed by their category."""

    categories: dict[str, FinCategory] = field(default_factory=dict)
    concretes: dict[str, FinSetFunctor] = field(default_factory=dict)
    functors: dict[str, Functor] = field(default_factory=dict)
    nats: dict[str, NatTrans] = field(default_factory=dict)
    signatures: dict[str, tuple[str, Signature]] = field(default_factory=dict)

    def concrete(self, name: str) -> ConcreteCategory:
        if name not in self.concretes:
            raise KeyError(f"category {name} has no concrete structure")
        return ConcreteCategory(self.categories[name], self.concretes[name])

    def add_concrete(self, k: ConcreteCategory, name: str | None = None) -> str:
        name = name or k.name
        cat = k.cat if k.cat.name == name else k.cat.renamed(name)
        self.categories[name] = cat
        self.concretes[name] = k.u
        return name

    def category_name(self, c: FinCategory) -> str:
        for n, d in self.categories.items():
            if d is c:
                return n
        for n, d in self.categories.items():
            if d == c:
                return n
        raise KeyError(f"category {c.name} is not in the workspace")

    def functor_name(self, f: Functor) -> str:
        for n, g in self.functors.items():
            if g is f or g == f:
                return n
        raise KeyError(f"functor {f.name} is not in the workspace")

    def structurally_equal(self, other: "Workspace") -> bool:
        def cat_key(c: FinCategory):
            return (c.objects, c.morphisms, c.identity, c.compose, c.name)

        if {n: cat_key(c) for n, c in self.categories.items()} != {n: cat_key(c) for n, c in other.categories.items()}:
            return False
        if {n: (u.carriers, u.action) for n, u in self.concretes.items()} != {
            n: (u.carriers, u.action) for n, u in other.concretes.items()
        }:
            return False
        fkey = lambda f: (f.source.name, f.target.name, f.obj_map, f.mor_map, f.name)
        if {n: fkey(f) for n, f in self.functors.items()} != {n: fkey(f) for n, f in other.functors.items()}:
            return False
        nkey = lambda t: (t.source.name, t.target.name, t.components, t.name)
        if {n: nkey(t) for n, t in self.nats.items()} != {n: nkey(t) for n, t in other.nats.items()}:
            return False
        skey = lambda s: (s[0], tuple((r.name, r.arity, dict(r.interp)) for r in s[1]))
        return {n: skey(s) for n, s in self.signatures.items()} == {n: skey(s) for n, s in other.signatures.items()}


def _resolve(decls: list[_Decl], hom_cap: int) -> Workspace:
    ws = Workspace()
    seen: dict[tuple[str, str], Token] = {}
    for d in decls:
        key = (d.kind, d.name)
        if key in seen:
            raise ResolutionError(f"duplicate {d.kind} {d.name}", d.token.line, d.token.column)
        seen[key] = d.token

    for d in decls:
        if d.kind == "category":
            ws.categories[d.name] = _build_category(d, hom_cap)
    for d in decls:
        if d.kind == "concrete":
            ws.concretes[d.name] = _build_concrete(d, ws)
    for d in decls:
        if d.kind == "functor":
            ws.functors[d.name] = _build_functor(d, ws)
    for d in decls:
        if d.kind == "nat":
            ws.nats[d.name] = _build_nat(d, ws)
    for d in decls:
        if d.kind == "signature":
            ws.signatures[d.name] = _build_signature(d, ws)
    return ws


def _err(cls, msg: str, tok: Token) -> DSLError:
    return cls(msg, tok.line, tok.column)


def _build_category(d: _Decl, hom_cap: int) -> FinCategory:
    objects: list[str] = []
    morphisms: dict[str, tuple[str, str]] = {}
    identity: dict[str, str] = {}
    compose: dict[tuple[str, str], str] = {}
    for kw, payload in d.body:
        if kw.text == "objects":
            for t in payload:
                if t.text in objects:
                    raise _err(ResolutionError, f"object {t.text} declared twice", t)
                objects.append(t.text)
    obj_set = set(objects)

    def need_obj(t: Token):
        if t.text not in obj_set:
            raise _err(ResolutionError, f"unknown object {t.text} in category {d.name}", t)

    for kw, payload in d.body:
        if kw.text == "hom":
            a, b, names = payload
            need_obj(a)
            need_obj(b)
            for t in names:
                if t.text in morphisms:
                    raise _err(ResolutionError, f"morphism {t.text} declared twice", t)
                morphisms[t.text] = (a.text, b.text)
        elif kw.text == "identity":
            a, m = payload
            need_obj(a)
            identity[a.text] = m.text
    for a in objects:
        ident = identity.setdefault(a, f"id_{a}")
        if ident not in morphisms:
            morphisms[ident] = (a, a)
        elif morphisms[ident] != (a, a):
            raise ResolutionError(f"identity {ident} of {a} is not an endomorphism of {a}", d.token.line, d.token.column)
    for kw, payload in d.body:
        if kw.text == "compose":
            g, f, h = payload
            for t in (g, f, h):
                if t.text not in morphisms:
                    raise _err(ResolutionError, f"composition entry {g.text} {f.text} = {h.text} names unknown morphism {t.text}", t)
            if (g.text, f.text) in compose and compose[g.text, f.text] != h.text:
                raise _err(LawError, f"composition {g.text} {f.text} given twice", g)
            compose[g.text, f.text] = h.text
    for f, (a, b) in morphisms.items():
        compose.setdefault((identity[b], f), f)
        compose.setdefault((f, identity[a]), f)
    cat = FinCategory(tuple(objects), morphisms, identity, compose, d.name)
    cap = check_hom_cap(cat, hom_cap)
    if not cap:
        raise LawError(f"category {d.name}: {cap.reason}", d.token.line, d.token.column)
    v = validate_category(cat)
    if not v:
        cls = ResolutionError if v.status == "structural" else LawError
        raise cls(f"category {d.name}: {v.reason} {list(v.witness)}", d.token.line, d.token.column)
    return cat


def _need(ws: Workspace, kind: str, tok: Token):
    table = {"category": ws.categories, "functor": ws.functors}[kind]
    if tok.text not in table:
        raise _err(ResolutionError, f"unknown {kind} {tok.text}", tok)
    return table[tok.text]


def _build_concrete(d: _Decl, ws: Workspace) -> FinSetFunctor:
    cat = _need(ws, "category", Token("id", d.name, d.token.line, d.token.column))
    carriers: dict[str, tuple[str, ...]] = {}
    action: dict[str, dict[str, str]] = {}
    for kw, (target, items) in d.body:
        if kw.text == "carrier":
            if target.text not in cat.morphisms and target.text not in set(cat.objects):
                raise _err(ResolutionError, f"unknown object {target.text}", target)
            if target.text not in set(cat.objects):
                raise _err(ResolutionError, f"unknown object {target.text}", target)
            carriers[target.text] = tuple(t.text for t in items)
    for a in cat.objects:
        carriers.setdefault(a, ())
    for kw, (target, items) in d.body:
        if kw.text == "action":
            if target.text not in cat.morphisms:
                raise _err(ResolutionError, f"unknown morphism {target.text}", target)
            a, b = cat.morphisms[target.text]
            fn = {}
            for x, y in items:
                if x.text not in carriers[a]:
                    raise _err(ResolutionError, f"{x.text} is not in the carrier of {a}", x)
                if y.text not in carriers[b]:
                    raise _err(ResolutionError, f"{y.text} is not in the carrier of {b}", y)
                fn[x.text] = y.text
            action[target.text] = fn
    for a in cat.objects:
        action.setdefault(cat.id(a), {x: x for x in carriers[a]})
    u = FinSetFunctor(carriers, action)
    v = validate_set_functor(ConcreteCategory(cat, u))
    if not v:
        raise LawError(f"concrete {d.name}: {v.reason} {list(v.witness)}", d.token.line, d.token.column)
    return u


def _build_functor(d: _Decl, ws: Workspace) -> Functor:
    src = _need(ws, "category", d.header["source"])
    tgt = _need(ws, "category", d.header["target"])
    obj_map, mor_map = {}, {}
    for kw, (x, y) in d.body:
        if kw.text == "obj":
            if x.text not in set(src.objects):
                raise _err(ResolutionError, f"unknown object {x.text} of {src.name}", x)
            if y.text not in set(tgt.objects):
                raise _err(ResolutionError, f"unknown object {y.text} of {tgt.name}", y)
            obj_map[x.text] = y.text
    for kw, (x, y) in d.body:
        if kw.text == "mor":
            if x.text not in src.morphisms:
                raise _err(ResolutionError, f"unknown morphism {x.text} of {src.name}", x)
            if y.text not in tgt.morphisms:
                raise _err(ResolutionError, f"unknown morphism {y.text} of {tgt.name}", y)
            mor_map[x.text] = y.text
    for a in src.objects:
        if a not in obj_map:
            raise ResolutionError(f"functor {d.name} leaves object {a} unmapped", d.token.line, d.token.column)
        mor_map.setdefault(src.id(a), tgt.id(obj_map[a]))
    for m in src.morphisms:
        if m not in mor_map:
            raise ResolutionError(f"functor {d.name} leaves morphism {m} unmapped", d.token.line, d.token.column)
    f = Functor(src, tgt, obj_map, mor_map, d.name)
    v = validate_functor(f)
    if not v:
        raise LawError(f"functor {d.name}: {v.reason} {list(v.witness)}", d.token.line, d.token.column)
    return f


def _build_nat(d: _Decl, ws: Workspace) -> NatTrans:
    f = _need(ws, "functor", d.header["source"])
    g = _need(ws, "functor", d.header["target"])
    comps = {}
    for _, (a, m) in d.body:
        if a.text not in set(f.source.objects):
            raise _err(ResolutionError, f"unknown object {a.text}", a)
        if m.text not in f.target.morphisms:
            raise _err(ResolutionError, f"unknown morphism {m.text}", m)
        comps[a.text] = m.text
    missing = [a for a in f.source.objects if a not in comps]
    if missing:
        raise ResolutionError(f"nat {d.name} has no component at {missing[0]}", d.token.line, d.token.column)
    t = NatTrans(f, g, comps, d.name)
    v = validate_nat(t)
    if not v:
        raise LawError(f"nat {d.name}: {v.reason} {list(v.witness)}", d.token.line, d.token.column)
    return t


def _build_signature(d: _Decl, ws: Workspace) -> tuple[str, Signature]:
    over = d.header["over"]
    cat = _need(ws, "category", over)
    carriers = ws.concretes.get(over.text)
    order: list[str] = []
    arity: dict[str, int] = {}
    interp: dict[str, dict[str, set]] = {}
    for _, (r, n, a, tuples) in d.body:
        if r.text in arity and arity[r.text] != int(n.text):
            raise _err(ResolutionError, f"relation {r.text} used with two arities", n)
        if r.text not in arity:
            order.append(r.text)
            arity[r.text] = int(n.text)
            interp[r.text] = {b: set() for b in cat.objects}
        if a is None:
            continue
        if a.text not in interp[r.text]:
            raise _err(ResolutionError, f"unknown object {a.text}", a)
        for start, items in tuples:
            if len(items) != arity[r.text]:
                raise _err(ResolutionError, f"tuple of length {len(items)} for {r.text}/{arity[r.text]}", start)
            for t in items:
                if carriers is None or t.text not in carriers.carriers[a.text]:
                    raise _err(ResolutionError, f"{t.text} is not in the carrier of {a.text}", t)
            interp[r.text][a.text].add(tuple(t.text for t in items))
    symbols = tuple(
        RelationSymbol(r, arity[r], {b: frozenset(v) for b, v in interp[r].items()}) for r in order
    )
    return over.text, Signature(symbols)


def parse(text: str, hom_cap: int = DEFAULT_HOM_CAP) -> Workspace:
    """Parse and validate a workspace; every failure is a :class:`DSLError`."""
    try:
        decls = _Parser(tokenize(text)).parse()
        return _resolve(decls, hom_cap)
    except DSLError:
        raise
    except (ValueError, KeyError, RecursionError) as exc:  # defensive: parsing stays total
        raise DSLSyntaxError(f"could not build workspace: {exc}") from exc


# ---------------------------------------------------------------- printer


def _hom_order(c: FinCategory) -> list[str]:
    """Morphisms in the order the hom lines list them."""
    return [m for a in c.objects for b in c.objects for m in c.hom(a, b)]


def _print_category(c: FinCategory, name: str) -> list[str]:
    q = quote
    lines = [f"category {q(name)} {{"]
    lines.append("  objects " + " ".join(q(a) for a in c.objects) if c.objects else "  objects")
    for a in c.objects:
        for b in c.objects:
            hs = c.hom(a, b)
            if hs:
                lines.append(f"  hom {q(a)} {q(b)} = " + " ".join(q(m) for m in hs))
    for a in c.objects:
        lines.append(f"  identity {q(a)} = {q(c.id(a))}")
    idents = set(c.identity.values())
    for (g, f), h in sorted(c.compose.items()):
        if g in idents or f in idents:
            continue
        lines.append(f"  compose {q(g)} {q(f)} = {q(h)}")
    lines.append("}")
    return lines


def _print_concrete(c: FinCategory, u: FinSetFunctor, name: str) -> list[str]:
    q = quote
    lines = [f"concrete {q(name)} {{"]
    for a in c.objects:
        lines.append(f"  carrier {q(a)} = {{" + " ".join(q(x) for x in u.carriers[a]) + "}")
    idents = set(c.identity.values())
    for m in _hom_order(c):
        if m in idents and all(x == y for x, y in u.action[m].items()):
            continue
        fn = u.action[m]
        a = c.morphisms[m][0]
        body = ", ".join(f"{q(x)}->{q(fn[x])}" for x in u.carriers[a])
        lines.append(f"  action {q(m)} = {body}".rstrip())
    lines.append("}")
    return lines


def _print_functor(f: Functor, name: str, src: str, tgt: str) -> list[str]:
    q = quote
    lines = [f"functor {q(name)} : {q(src)} -> {q(tgt)} {{"]
    for a in f.source.objects:
        lines.append(f"  obj {q(a)} -> {q(f.ob(a))}")
    for m in _hom_order(f.source):
        a = f.source.morphisms[m][0]
        if m == f.source.id(a) and f.mor(m) == f.target.id(f.ob(a)):
            continue
        lines.append(f"  mor {q(m)} -> {q(f.mor(m))}")
    lines.append("}")
    return lines


def _print_nat(t: NatTrans, name: str, src: str, tgt: str) -> list[str]:
    q = quote
    lines = [f"nat {q(name)} : {q(src)} => {q(tgt)} {{"]
    for a in t.source.source.objects:
        lines.append(f"  at {q(a)} = {q(t.components[a])}")
    lines.append("}")
    return lines


def _print_signature(over: str, sig: Signature, name: str, objects) -> list[str]:
    q = quote
    lines = [f"signature {q(name)} over {q(over)} {{"]
    for r in sig:
        head = f"  rel {q(r.name)}/{r.arity}"
        rows = [a for a in objects if r.at(a)]
        if not rows:
            lines.append(head)
        for a in rows:
            body = " ".join("(" + ",".join(q(x) for x in t) + ")" for t in sorted(r.at(a)))
            lines.append(f"{head} at {q(a)} = {{{body}}}")
    lines.append("}")
    return lines


def print_workspace(ws: Workspace) -> str:
    """Canonical text: declarations sorted by kind then name."""
    blocks: list[list[str]] = []
    for n in sorted(ws.categories):
        blocks.append(_print_category(ws.categories[n], n))
    for n in sorted(ws.concretes):
        blocks.append(_print_concrete(ws.categories[n], ws.concretes[n], n))
    for n in sorted(ws.functors):
        f = ws.functors[n]
        blocks.append(_print_functor(f, n, ws.category_name(f.source), ws.category_name(f.target)))
    for n in sorted(ws.nats):
        t = ws.nats[n]
        blocks.append(_print_nat(t, n, ws.functor_name(t.source), ws.functor_name(t.target)))
    for n in sorted(ws.signatures):
        over, sig = ws.signatures[n]
        blocks.append(_print_signature(over, sig, n, ws.categories[over].objects))
    return "\n\n".join("\n".join(b) for b in blocks) + ("\n" if blocks else "")
