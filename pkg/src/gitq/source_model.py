"""Structural parsing of Java sources into an immutable corpus model.

The parser is deliberately shallow: it recovers packages, imports, type
declarations with their extends/implements clauses, fields, method
signatures, and identifier-level field references and call names inside
method bodies. No type checking, no generics resolution, no overload
resolution beyond arity.
"""

from __future__ import annotations

import contextlib
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ModelError, ParseError, UnknownClass

SOURCE_SUFFIX = ".java"

# Reserved words; contextual keywords (var, yield, record, sealed, permits)
# are handled positionally so identifiers with those names keep working.
_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null""".split()
)

_MODIFIERS = frozenset(
    """public private protected static final abstract native synchronized
    transient volatile strictfp default sealed""".split()
)

_TOKEN_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*|\d[\dA-Za-z_.]*|::|->|[^\s]")

_IDENT_RE = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")


def _is_ident(tok: str) -> bool:
    return bool(_IDENT_RE.match(tok)) and tok not in _KEYWORDS


@dataclass(frozen=True)
class MethodInfo:
    """One declared method: its arity and what its body touches."""

    name: str
    arity: int
    referenced_fields: frozenset[str]
    invoked_names: frozenset[str]
    is_override_annotated: bool = False


@dataclass(frozen=True)
class ClassInfo:
    """One declared type (class, interface, or enum)."""

    qualified_name: str
    simple_name: str
    package_name: str
    kind: str  # "class" | "interface" | "enum"
    superclass_name: str | None
    interface_names: tuple[str, ...]
    methods: tuple[MethodInfo, ...]
    field_names: frozenset[str]
    # Raw reference material for coupling and dependency analysis:
    # type names written in field/parameter/return positions, and the
    # receivers of qualified calls (``Helper`` in ``Helper.run()``).
    type_reference_names: frozenset[str] = frozenset()
    receiver_names: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SourceUnit:
    """One parsed source file."""

    path: str
    package_name: str
    imports: tuple[str, ...]
    wildcard_imports: tuple[str, ...]
    declared_classes: tuple[ClassInfo, ...]


class CorpusModel:
    """All parsed classes of a snapshot plus their internal inheritance edges.

    Immutable after construction; safe to share across metric computations.
    """

    def __init__(self, units: list[SourceUnit], diagnostics: list[str]):
        self.units: tuple[SourceUnit, ...] = tuple(sorted(units, key=lambda u: u.path))
        self.diagnostics: tuple[str, ...] = tuple(diagnostics)
        self.classes: dict[str, ClassInfo] = {}
        self.file_of: dict[str, str] = {}
        self._unit_of: dict[str, SourceUnit] = {}
        for unit in self.units:
            for cls in unit.declared_classes:
                self.classes[cls.qualified_name] = cls
                self.file_of[cls.qualified_name] = unit.path
                self._unit_of[cls.qualified_name] = unit
        self._simple_index: dict[str, list[str]] = {}
        for qname, cls in self.classes.items():
            self._simple_index.setdefault(cls.simple_name, []).append(qname)
        self._parent_of: dict[str, str] = {}
        for qname, cls in self.classes.items():
            parent = self._declared_parent(cls)
            if parent is not None:
                self._parent_of[qname] = parent
        self._check_acyclic()
        self.inheritance_edges: frozenset[tuple[str, str]] = frozenset(
            self._parent_of.items()
        )

    def _declared_parent(self, cls: ClassInfo) -> str | None:
        # Classes inherit through extends; interfaces through their first
        # extended interface, which keeps every ancestor path a chain.
        if cls.kind == "interface":
            written = cls.interface_names[0] if cls.interface_names else None
        else:
            written = cls.superclass_name
        if written is None:
            return None
        return self.resolve_reference(written, cls.qualified_name)

    def _check_acyclic(self) -> None:
        state: dict[str, int] = {}  # 0 visiting, 1 done
        for start in self._parent_of:
            if state.get(start) == 1:
                continue
            chain: list[str] = []
            node: str | None = start
            while node is not None and state.get(node) != 1:
                if state.get(node) == 0:
                    cycle = chain[chain.index(node):] + [node]
                    raise ModelError("inheritance cycle: " + " -> ".join(cycle))
                state[node] = 0
                chain.append(node)
                node = self._parent_of.get(node)
            for seen in chain:
                state[seen] = 1

    def resolve_reference(self, written: str, from_qualified: str) -> str | None:
        """Resolve a written type name from the context of a corpus class."""
        cls = self.classes.get(from_qualified)
        if cls is None:
            raise UnknownClass(from_qualified)
        unit = self._unit_of[from_qualified]
        return self.resolve_name(written, cls.package_name, unit.imports)

    def resolve_name(
        self, written: str, package_name: str, imports: tuple[str, ...]
    ) -> str | None:
        """Resolution order: exact qualified name, explicit import,
        same-package simple name, unique simple name. None means external."""
        if written in self.classes:
            return written
        if "." not in written:
            for imp in imports:
                if imp == written or imp.endswith("." + written):
                    return imp if imp in self.classes else None
            candidate = f"{package_name}.{written}" if package_name else written
            if candidate in self.classes:
                return candidate
            matches = self._simple_index.get(written, [])
            if len(matches) == 1:
                return matches[0]
            return None
        # Dotted but not fully qualified: try it as a nested name of the
        # same package (Outer.Inner written from a sibling class).
        candidate = f"{package_name}.{written}" if package_name else written
        if candidate in self.classes:
            return candidate
        return None

    def ancestors(self, qualified_name: str) -> list[str]:
        if qualified_name not in self.classes:
            raise UnknownClass(qualified_name)
        out: list[str] = []
        node = self._parent_of.get(qualified_name)
        while node is not None:
            out.append(node)
            node = self._parent_of.get(node)
        return out

    def children_of(self, qualified_name: str) -> list[str]:
        return [c for c, p in self._parent_of.items() if p == qualified_name]


def resolve_hierarchy(model: CorpusModel, qualified_name: str) -> list[str]:
    """Internal ancestors of a class, ordered child to root."""
    return model.ancestors(qualified_name)


# ---------------------------------------------------------------------------
# Lexing
# ---------------------------------------------------------------------------

def _scrub(text: str) -> str:
    """Blank out comments and string/char literals, preserving newlines."""
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            j = n if j == -1 else j
            out.append(" " * (j - i))
            i = j
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            j = n if j == -1 else j + 2
            out.append("".join(ch if ch == "\n" else " " for ch in text[i:j]))
            i = j
        elif c == '"' and text[i:i + 3] == '"""':
            j = text.find('"""', i + 3)
            j = n if j == -1 else j + 3
            out.append("".join(ch if ch == "\n" else " " for ch in text[i:j]))
            i = j
        elif c == '"' or c == "'":
            quote = c
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == quote or text[j] == "\n":
                    j += 1
                    break
                j += 1
            out.append(" " * (min(j, n) - i))
            i = min(j, n)
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_RE.findall(text) if not t.isspace()]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_OPEN = {"(": ")", "{": "}", "[": "]"}


class _Cursor:
    def __init__(self, tokens: list[str], path: str):
        self.toks = tokens
        self.i = 0
        self.path = path

    def peek(self, offset: int = 0) -> str | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"{self.path}: unexpected end of file")
        self.i += 1
        return tok

    def expect_ident(self, what: str) -> str:
        tok = self.next()
        if not _IDENT_RE.match(tok):
            raise ParseError(f"{self.path}: expected {what}, found {tok!r}")
        return tok

    def skip_balanced(self, opener: str) -> list[str]:
        """Consume a balanced (){}[] group (opener already peeked); returns
        the tokens strictly inside it."""
        assert self.next() == opener
        closer = _OPEN[opener]
        depth = 1
        inner: list[str] = []
        while depth:
            tok = self.next()
            if tok in _OPEN:
                depth += 1
            elif tok in (")", "}", "]"):
                depth -= 1
                if depth == 0:
                    break
            inner.append(tok)
        return inner

    def skip_generics(self) -> list[str]:
        """Consume a balanced <...> group; safe in declaration headers where
        ``<`` is always generics. Returns the inner tokens."""
        assert self.next() == "<"
        depth = 1
        inner: list[str] = []
        while depth:
            tok = self.next()
            if tok == "<":
                depth += 1
            elif tok == ">":
                depth -= 1
                if depth == 0:
                    break
            inner.append(tok)
        return inner

    def read_dotted(self) -> str:
        """Read ident(.ident)* optionally interleaved with generic args."""
        parts = [self.expect_ident("name")]
        while True:
            if self.peek() == "<":
                self.skip_generics()
            if self.peek() == "." and self.peek(1) and _IDENT_RE.match(self.peek(1) or ""):
                self.next()
                parts.append(self.next())
            else:
                break
        return ".".join(parts)

    def skip_annotation(self) -> str:
        """Consume ``@Name(...)``; returns the annotation's dotted name."""
        assert self.next() == "@"
        name = self.read_dotted()
        if self.peek() == "(":
            self.skip_balanced("(")
        return name


def _harvest_type_names(tokens: list[str]) -> set[str]:
    """Dotted identifier chains within a type expression, keywords excluded."""
    names: set[str] = set()
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        if tok == "@":  # annotation: skip name and optional args
            i += 1
            while i < n and (_IDENT_RE.match(tokens[i]) or tokens[i] == "."):
                i += 1
            if i < n and tokens[i] == "(":
                depth = 1
                i += 1
                while i < n and depth:
                    if tokens[i] == "(":
                        depth += 1
                    elif tokens[i] == ")":
                        depth -= 1
                    i += 1
            continue
        if _is_ident(tok):
            parts = [tok]
            j = i + 1
            while j + 1 < n and tokens[j] == "." and _IDENT_RE.match(tokens[j + 1]):
                if tokens[j + 1] in _KEYWORDS:
                    break
                parts.append(tokens[j + 1])
                j += 2
            names.add(".".join(parts))
            i = j
        else:
            i += 1
    return names


def _split_parameters(tokens: list[str]) -> list[list[str]]:
    """Split a parameter list on top-level commas; ``<`` always nests here."""
    if not tokens:
        return []
    segments: list[list[str]] = [[]]
    depth = 0
    for tok in tokens:
        if tok in ("(", "[", "<"):
            depth += 1
        elif tok in (")", "]", ">"):
            depth -= 1
        if tok == "," and depth == 0:
            segments.append([])
        else:
            segments[-1].append(tok)
    return segments


def _parse_parameters(inner: list[str]) -> tuple[int, set[str]]:
    """Arity and the type names referenced by a parameter list."""
    segments = [s for s in _split_parameters(inner) if s]
    type_names: set[str] = set()
    for seg in segments:
        idents = [t for t in seg if _is_ident(t)]
        if not idents:
            continue
        # last identifier is the parameter name; the rest belong to the type
        harvested = _harvest_type_names(seg)
        name = idents[-1]
        harvested.discard(name)
        type_names |= harvested
    return len(segments), type_names


def _scan_body(tokens: list[str], field_names: frozenset[str]) -> tuple[
    frozenset[str], frozenset[str], frozenset[str]
]:
    """Identifier-level scan of a method body.

    Returns (referenced fields, invoked call names, call receivers).
    """
    refs: set[str] = set()
    calls: set[str] = set()
    receivers: set[str] = set()
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if not _is_ident(tok):
            continue
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < n else None
        if nxt == "(":
            if prev == "new" or prev == "::":
                continue
            calls.add(tok)
            if prev == ".":
                # walk the dotted receiver chain backwards
                parts: list[str] = []
                j = i - 1
                while j >= 1 and tokens[j] == "." and _is_ident(tokens[j - 1]):
                    parts.append(tokens[j - 1])
                    j -= 2
                if parts:
                    parts.reverse()
                    receivers.add(parts[0])
                    if len(parts) > 1:
                        receivers.add(".".join(parts))
        elif tok in field_names:
            if prev != "." or (i >= 2 and tokens[i - 2] == "this"):
                refs.add(tok)
    return frozenset(refs), frozenset(calls), frozenset(receivers)


class _UnitParser:
    def __init__(self, path: str, text: str):
        self.path = path
        self.cur = _Cursor(_tokenize(_scrub(text)), path)
        self.package = ""
        self.imports: list[str] = []
        self.wildcards: list[str] = []
        self.classes: list[ClassInfo] = []

    def parse(self) -> SourceUnit:
        cur = self.cur
        while cur.peek() is not None:
            tok = cur.peek()
            if tok == "package":
                cur.next()
                self.package = cur.read_dotted()
            elif tok == "import":
                self._parse_import()
            elif tok == "@":
                mark = cur.i
                name = cur.skip_annotation()
                if name == "interface":  # annotation type declaration
                    cur.i = mark
                    self._skip_annotation_type()
            elif tok in ("class", "interface", "enum") or self._at_record():
                self._parse_type(cur.next(), prefix="")
            else:
                cur.next()  # modifiers, semicolons, stray tokens
        seen: set[str] = set()
        for cls in self.classes:
            if cls.qualified_name in seen:
                raise ParseError(
                    f"{self.path}: duplicate class {cls.qualified_name}"
                )
            seen.add(cls.qualified_name)
        return SourceUnit(
            path=self.path,
            package_name=self.package,
            imports=tuple(dict.fromkeys(self.imports)),
            wildcard_imports=tuple(dict.fromkeys(self.wildcards)),
            declared_classes=tuple(self.classes),
        )

    def _at_record(self) -> bool:
        cur = self.cur
        return (
            cur.peek() == "record"
            and cur.peek(1) is not None
            and _is_ident(cur.peek(1) or "")
            and cur.peek(2) in ("(", "<")
        )

    def _parse_import(self) -> None:
        cur = self.cur
        cur.next()  # import
        static = cur.peek() == "static"
        if static:
            cur.next()
        parts = [cur.expect_ident("import name")]
        wildcard = False
        while cur.peek() == ".":
            cur.next()
            if cur.peek() == "*":
                cur.next()
                wildcard = True
                break
            parts.append(cur.expect_ident("import segment"))
        if cur.peek() == ";":
            cur.next()
        if static:  # member imports carry no type-resolution weight here
            return
        if wildcard:
            self.wildcards.append(".".join(parts))
        else:
            self.imports.append(".".join(parts))

    def _skip_annotation_type(self) -> None:
        cur = self.cur
        cur.next()  # @
        cur.next()  # interface
        cur.expect_ident("annotation type name")
        while cur.peek() is not None and cur.peek() != "{":
            cur.next()
        if cur.peek() == "{":
            cur.skip_balanced("{")

    def _parse_type(self, kind_token: str, prefix: str) -> None:
        cur = self.cur
        kind = "class" if kind_token == "record" else kind_token
        simple = cur.expect_ident("type name")
        if cur.peek() == "<":
            cur.skip_generics()
        if kind_token == "record" and cur.peek() == "(":
            cur.skip_balanced("(")
        superclass: str | None = None
        interfaces: list[str] = []
        while cur.peek() in ("extends", "implements", "permits"):
            clause = cur.next()
            names = self._read_type_list()
            if clause == "extends":
                if kind == "interface":
                    interfaces.extend(names)
                elif names:
                    superclass = names[0]
            elif clause == "implements":
                interfaces.extend(names)
            # permits: discarded
        if cur.peek() != "{":
            raise ParseError(f"{self.path}: type {simple} has no body")
        nested_prefix = f"{prefix}{simple}."
        local_name = f"{prefix}{simple}"
        qualified = f"{self.package}.{local_name}" if self.package else local_name
        body = _BodyParser(self, kind, simple, nested_prefix)
        body.run()
        self.classes.append(
            ClassInfo(
                qualified_name=qualified,
                simple_name=simple,
                package_name=self.package,
                kind=kind,
                superclass_name=superclass,
                interface_names=tuple(interfaces),
                methods=tuple(body.methods),
                field_names=frozenset(body.fields),
                type_reference_names=frozenset(body.type_names),
                receiver_names=frozenset(body.receivers),
            )
        )

    def _read_type_list(self) -> list[str]:
        cur = self.cur
        names = [cur.read_dotted()]
        while cur.peek() == ",":
            cur.next()
            names.append(cur.read_dotted())
        return names


class _BodyParser:
    """Parses one type body: fields, methods, nested types, enum constants."""

    def __init__(self, unit: _UnitParser, kind: str, simple_name: str, nested_prefix: str):
        self.unit = unit
        self.cur = unit.cur
        self.kind = kind
        self.simple_name = simple_name
        self.nested_prefix = nested_prefix
        self.fields: set[str] = set()
        self.methods: list[MethodInfo] = []
        self.type_names: set[str] = set()
        self.receivers: set[str] = set()
        self._method_bodies: list[tuple[MethodInfo, list[str]]] = []

    def run(self) -> None:
        cur = self.cur
        assert cur.next() == "{"
        if self.kind == "enum":
            self._parse_enum_constants()
        override_next = False
        while True:
            tok = cur.peek()
            if tok is None:
                raise ParseError(f"{self.unit.path}: unterminated body of {self.simple_name}")
            if tok == "}":
                cur.next()
                break
            if tok == ";":
                cur.next()
                continue
            if tok == "@":
                name = cur.skip_annotation()
                if name == "Override":
                    override_next = True
                continue
            if tok == "{":  # instance initializer
                cur.skip_balanced("{")
                continue
            if tok == "static" and cur.peek(1) == "{":
                cur.next()
                cur.skip_balanced("{")
                continue
            if tok in _MODIFIERS:
                cur.next()
                continue
            if tok == "<":  # generic method type parameters
                cur.skip_generics()
                continue
            if tok in ("class", "interface", "enum") or self.unit._at_record():
                self.unit._parse_type(cur.next(), prefix=self.nested_prefix)
                override_next = False
                continue
            self._parse_member(override_next)
            override_next = False
        # bodies are scanned once all fields of the class are known
        for info, body in self._method_bodies:
            refs, calls, recv = _scan_body(body, frozenset(self.fields))
            self.receivers |= recv
            self.methods.append(
                MethodInfo(
                    name=info.name,
                    arity=info.arity,
                    referenced_fields=refs,
                    invoked_names=calls,
                    is_override_annotated=info.is_override_annotated,
                )
            )

    def _parse_enum_constants(self) -> None:
        cur = self.cur
        while True:
            tok = cur.peek()
            if tok is None:
                raise ParseError(f"{self.unit.path}: unterminated enum {self.simple_name}")
            if tok == ";":
                cur.next()
                return
            if tok == "}":
                return  # constant-only enum; run() consumes the brace
            if tok == "@":
                cur.skip_annotation()
                continue
            if tok == ",":
                cur.next()
                continue
            if _IDENT_RE.match(tok):
                self.fields.add(cur.next())  # constants are implicit fields
                if cur.peek() == "(":
                    cur.skip_balanced("(")
                if cur.peek() == "{":
                    cur.skip_balanced("{")
                continue
            cur.next()

    def _parse_member(self, override_annotated: bool) -> None:
        """One field or method. Scans the header up to the first structural
        delimiter; generics in the header are always type arguments."""
        cur = self.cur
        head: list[str] = []
        while True:
            tok = cur.peek()
            if tok is None:
                raise ParseError(f"{self.unit.path}: unterminated member in {self.simple_name}")
            if tok == "@":
                name = cur.skip_annotation()
                if name == "Override":
                    override_annotated = True
                continue
            if tok == "<":
                head.extend(cur.skip_generics())
                continue
            if tok in ("(", "=", ";", "{", "}"):
                break
            if tok in ("class", "interface", "enum"):
                # modifiers preceded a nested declaration
                self.unit._parse_type(cur.next(), prefix=self.nested_prefix)
                return
            head.append(cur.next())
        delim = cur.peek()
        if delim == "(":
            self._parse_callable(head, override_annotated)
        elif delim in ("=", ";"):
            self._parse_field(head)
        elif delim == "{":
            cur.skip_balanced("{")  # stray block; discard header
        # '}' ends the body; leave it for run()

    def _parse_callable(self, head: list[str], override_annotated: bool) -> None:
        cur = self.cur
        idents = [t for t in head if _is_ident(t)]
        if not idents:
            cur.skip_balanced("(")
            return
        name = idents[-1]
        arity, param_types = _parse_parameters(cur.skip_balanced("("))
        is_constructor = name == self.simple_name and len(head) == 1
        self.type_names |= param_types
        if not is_constructor:
            return_head = head[: _last_index(head, name)]
            self.type_names |= _harvest_type_names(return_head)
        if cur.peek() == "throws":
            cur.next()
            self.unit._read_type_list()
        body: list[str] = []
        if cur.peek() == "{":
            body = cur.skip_balanced("{")
        elif cur.peek() == ";":
            cur.next()
        elif cur.peek() == "default":  # annotation-style default value
            while cur.peek() not in (";", None):
                cur.next()
        if is_constructor:
            return
        placeholder = MethodInfo(
            name=name,
            arity=arity,
            referenced_fields=frozenset(),
            invoked_names=frozenset(),
            is_override_annotated=override_annotated,
        )
        self._method_bodies.append((placeholder, body))

    def _parse_field(self, head: list[str]) -> None:
        cur = self.cur
        idents = [t for t in head if _is_ident(t)]
        if not idents:
            if cur.peek() in ("=", ";"):
                cur.next()
            return
        name = idents[-1]
        self.fields.add(name)
        type_head = head[: _last_index(head, name)]
        self.type_names |= _harvest_type_names(type_head)
        while True:
            tok = cur.peek()
            if tok == ";" or tok is None:
                if tok == ";":
                    cur.next()
                return
            if tok == "=":
                cur.next()
                self._skip_initializer()
                continue
            if tok == ",":
                cur.next()
                nxt = cur.peek()
                if nxt is not None and _is_ident(nxt):
                    self.fields.add(cur.next())
                    while cur.peek() == "[":
                        cur.skip_balanced("[")
                continue
            if tok == "[":
                cur.skip_balanced("[")
                continue
            cur.next()

    def _skip_initializer(self) -> None:
        """Consume an initializer expression up to a declarator-separating
        comma or the terminating semicolon."""
        cur = self.cur
        while True:
            tok = cur.peek()
            if tok is None or tok == ";":
                return
            if tok in _OPEN:
                cur.skip_balanced(tok)
                continue
            if tok == ",":
                # a new declarator looks like `name =`, `name ,` or `name ;`
                nxt = cur.peek(1)
                after = cur.peek(2)
                if nxt is not None and _is_ident(nxt) and after in ("=", ",", ";"):
                    return
                cur.next()
                continue
            cur.next()


def _last_index(tokens: list[str], value: str) -> int:
    for i in range(len(tokens) - 1, -1, -1):
        if tokens[i] == value:
            return i
    return len(tokens)


def parse_unit(path: str, text: str) -> SourceUnit:
    """Parse one source file. Raises ParseError on unrecoverable syntax."""
    try:
        return _UnitParser(path, text).parse()
    except ParseError:
        raise
    except RecursionError:
        raise ParseError(f"{path}: nesting too deep")


def iter_source_files(root: Path) -> list[Path]:
    """All analyzed-language files under root, excluding git metadata."""
    out = []
    for p in sorted(root.rglob("*" + SOURCE_SUFFIX)):
        if ".git" in p.relative_to(root).parts:
            continue
        if p.is_file() and p.name.endswith(SOURCE_SUFFIX):
            out.append(p)
    return out


def build_corpus(workspace) -> CorpusModel:
    """Parse every matching file of a workspace (or plain directory).

    Files that fail to parse are skipped and recorded as diagnostics; a
    duplicate qualified class name skips the later file the same way.
    """
    if isinstance(workspace, (str, Path)):
        root, lease = Path(workspace), _null_lease()
    else:
        root, lease = Path(workspace.root), workspace.lease()
    units: list[SourceUnit] = []
    diagnostics: list[str] = []
    with lease:
        seen: dict[str, str] = {}
        for path in iter_source_files(root):
            rel = str(path.relative_to(root))
            try:
                text = path.read_text(encoding="utf-8", errors="replace")
                unit = parse_unit(rel, text)
            except ParseError as exc:
                diagnostics.append(f"skipped {rel}: {exc}")
                continue
            clash = next(
                (c.qualified_name for c in unit.declared_classes if c.qualified_name in seen),
                None,
            )
            if clash is not None:
                diagnostics.append(
                    f"skipped {rel}: class {clash} already declared in {seen[clash]}"
                )
                continue
            for cls in unit.declared_classes:
                seen[cls.qualified_name] = rel
            units.append(unit)
    return CorpusModel(units, diagnostics)


@contextlib.contextmanager
def _null_lease():
    yield
