"""Text DSL for Hamiltonian term lists (.hspec files).

Grammar (tokens are ASCII; input is UTF-8; # comments run to end of line):

    spec      := stmt* ;
    stmt      := "mode" IDENT "(" INT ")" ";"
               | "qubit" IDENT ";"
               | "param" IDENT "=" cexpr ";"
               | term ;
    term      := "term" cexpr "*" opprod ("@" cexpr)? ("+h.c.")? ";" ;
    opprod    := opfactor ("*" opfactor)* ;
    opfactor  := ("a"|"adag") "(" IDENT ")" | ("sp"|"sm"|"sz") "(" IDENT ")" ;
    cexpr     := arithmetic over REAL, INT, "i", "pi", IDENT
                 with + - * / , unary +-, and parentheses ;

A term without "@" is static (frequency 0).  "+h.c." appends the
conjugate term (adjoint product, conjugated coefficient, negated
frequency); without it, the conjugate of every oscillating term must be
spelled out or lowering fails.

Canonical form: mode and qubit declarations are sorted by name (the
sorted rank of a mode name is its mode index in the lowered space),
parameters keep declaration order so bindings stay evaluable, and terms
are sorted by operator product, frequency and coefficient text.
``parse`` always returns the canonical form, so
``parse(serialize(x)) == x`` and serializing a canonical text is the
identity.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .hilbert import SpaceError, make_space
from .terms import HamiltonianTerm, TermList, PairingError, adjoint_tag

MAX_NESTING = 100
OPFACTOR_KINDS = ("a", "adag", "sp", "sm", "sz")
_MODE_FACTORS = {"a", "adag"}
_STMT_KEYWORDS = {"mode", "qubit", "param", "term"}
_RESERVED_NAMES = {"i", "pi"} | _STMT_KEYWORDS


class HspecError(ValueError):
    """Diagnostic with a source position and the expected-token set."""

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.reason = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(expected))
        text = f"{line}:{col}: {message}"
        if self.expected:
            text += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(text)


# ---------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<comment>\#[^\n]*)
    | (?P<hc>\+h\.c\.)
    | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
    | (?P<int>\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<punct>[();=*+\-/@])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'REAL' | 'INT' | 'IDENT' | 'HC' | 'EOF' | keyword | punct char
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise HspecError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        lexeme = m.group()
        col = pos - line_start + 1
        if kind == "ws" or kind == "comment":
            pass
        elif kind == "hc":
            tokens.append(Token("HC", lexeme, line, col))
        elif kind == "real":
            tokens.append(Token("REAL", lexeme, line, col))
        elif kind == "int":
            tokens.append(Token("INT", lexeme, line, col))
        elif kind == "ident":
            tok_kind = lexeme if lexeme in _STMT_KEYWORDS else "IDENT"
            tokens.append(Token(tok_kind, lexeme, line, col))
        else:
            tokens.append(Token(lexeme, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, n - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Expr:
    line: int = field(compare=False, default=0, kw_only=True)
    col: int = field(compare=False, default=0, kw_only=True)


@dataclass(frozen=True)
class Num(Expr):
    value: float = 0.0


@dataclass(frozen=True)
class ImagUnit(Expr):
    pass


@dataclass(frozen=True)
class PiConst(Expr):
    pass


@dataclass(frozen=True)
class Ref(Expr):
    name: str = ""


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr = None


@dataclass(frozen=True)
class BinOp(Expr):
    op: str = ""
    left: Expr = None
    right: Expr = None


@dataclass(frozen=True)
class OpFactor:
    kind: str  # a | adag | sp | sm | sz
    target: str


@dataclass(frozen=True)
class ModeDecl:
    name: str
    cutoff: int


@dataclass(frozen=True)
class QubitDecl:
    name: str


@dataclass(frozen=True)
class ParamDecl:
    name: str
    value: Expr


@dataclass(frozen=True)
class TermStmt:
    coefficient: Expr
    factors: tuple[OpFactor, ...]
    frequency: Expr | None
    hermitian_conjugate: bool


@dataclass(frozen=True)
class HamiltonianSpec:
    modes: tuple[ModeDecl, ...]
    qubits: tuple[QubitDecl, ...]
    params: tuple[ParamDecl, ...]
    term_stmts: tuple[TermStmt, ...]

    @property
    def mode_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.modes)

    @property
    def qubit_names(self) -> tuple[str, ...]:
        return tuple(q.name for q in self.qubits)


# ---------------------------------------------------------------------------
# parser

_COEFF_START = ("number", "identifier", "'i'", "'pi'", "'('", "'-'", "'+'")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        k = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[k]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Token, expected: tuple[str, ...] = ()):
        raise HspecError(message, tok.line, tok.col, expected)

    def expect(self, kind: str, expected_desc: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.error(
                f"unexpected {describe(tok)}", tok, (expected_desc,)
            )
        return self.advance()

    # statements ------------------------------------------------------

    def parse_spec(self) -> tuple[list, list, list, list]:
        modes, qubits, params, term_stmts = [], [], [], []
        names: dict[str, str] = {}
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if tok.kind == "mode":
                self.advance()
                name = self._decl_name(names, "mode")
                self.expect("(", "'('")
                cut_tok = self.expect("INT", "integer cutoff")
                cutoff = int(cut_tok.text)
                if cutoff < 1:
                    self.error("mode cutoff must be at least 1", cut_tok)
                self.expect(")", "')'")
                self.expect(";", "';'")
                modes.append(ModeDecl(name, cutoff))
            elif tok.kind == "qubit":
                self.advance()
                name = self._decl_name(names, "qubit")
                self.expect(";", "';'")
                qubits.append(QubitDecl(name))
            elif tok.kind == "param":
                self.advance()
                name = self._decl_name(names, "param")
                self.expect("=", "'='")
                value = self.parse_expr(names, stop_at_opfactor=False)
                self.expect(";", "';'")
                params.append(ParamDecl(name, value))
            elif tok.kind == "term":
                self.advance()
                term_stmts.append(self.parse_term(names))
            else:
                self.error(
                    f"unexpected {describe(tok)}",
                    tok,
                    ("'mode'", "'qubit'", "'param'", "'term'"),
                )
        return modes, qubits, params, term_stmts

    def _decl_name(self, names: dict[str, str], kind: str) -> str:
        tok = self.expect("IDENT", "identifier")
        if tok.text in _RESERVED_NAMES:
            self.error(f"{tok.text!r} is reserved and cannot be declared", tok)
        if tok.text in names:
            self.error(
                f"duplicate declaration of {tok.text!r} (already a {names[tok.text]})",
                tok,
            )
        names[tok.text] = kind
        return tok.text

    def parse_term(self, names: dict[str, str]) -> TermStmt:
        coeff = self.parse_expr(names, stop_at_opfactor=True)
        self.expect("*", "'*'")
        factors = [self.parse_opfactor(names)]
        while self.peek().kind == "*":
            self.advance()
            factors.append(self.parse_opfactor(names))
        freq = None
        if self.peek().kind == "@":
            self.advance()
            freq = self.parse_expr(names, stop_at_opfactor=False)
        hc = False
        if self.peek().kind == "HC":
            self.advance()
            hc = True
        self.expect(";", "';'")
        return TermStmt(coeff, tuple(factors), freq, hc)

    def parse_opfactor(self, names: dict[str, str]) -> OpFactor:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.text not in OPFACTOR_KINDS:
            self.error(
                f"unexpected {describe(tok)}",
                tok,
                tuple(f"'{k}'" for k in OPFACTOR_KINDS),
            )
        self.advance()
        self.expect("(", "'('")
        target = self.expect("IDENT", "mode or qubit name")
        self.expect(")", "')'")
        declared = names.get(target.text)
        if declared is None:
            self.error(f"unbound identifier {target.text!r}", target)
        need = "mode" if tok.text in _MODE_FACTORS else "qubit"
        if declared != need:
            self.error(
                f"{tok.text}(...) needs a {need}, but {target.text!r} is a {declared}",
                target,
            )
        return OpFactor(tok.text, target.text)

    # expressions -----------------------------------------------------

    def _at_opfactor(self) -> bool:
        tok = self.peek()
        return (
            tok.kind == "IDENT"
            and tok.text in OPFACTOR_KINDS
            and self.peek(1).kind == "("
        )

    def parse_expr(self, names: dict[str, str], stop_at_opfactor: bool, depth: int = 0) -> Expr:
        node = self.parse_product(names, stop_at_opfactor, depth)
        while self.peek().kind in ("+", "-"):
            op_tok = self.advance()
            right = self.parse_product(names, stop_at_opfactor, depth)
            node = BinOp(op=op_tok.text, left=node, right=right, line=op_tok.line, col=op_tok.col)
        return node

    def parse_product(self, names: dict[str, str], stop_at_opfactor: bool, depth: int) -> Expr:
        node = self.parse_unary(names, stop_at_opfactor, depth)
        while True:
            tok = self.peek()
            if tok.kind == "*":
                if stop_at_opfactor and (
                    self.peek(1).kind == "IDENT"
                    and self.peek(1).text in OPFACTOR_KINDS
                    and self.peek(2).kind == "("
                ):
                    break  # the '*' separates coefficient from operator product
                self.advance()
                right = self.parse_unary(names, stop_at_opfactor, depth)
                node = BinOp(op="*", left=node, right=right, line=tok.line, col=tok.col)
            elif tok.kind == "/":
                self.advance()
                right = self.parse_unary(names, stop_at_opfactor, depth)
                node = BinOp(op="/", left=node, right=right, line=tok.line, col=tok.col)
            else:
                break
        return node

    def parse_unary(self, names: dict[str, str], stop_at_opfactor: bool, depth: int) -> Expr:
        tok = self.peek()
        if tok.kind == "-":
            self.advance()
            child = self.parse_unary(names, stop_at_opfactor, depth)
            if isinstance(child, Num):
                return Num(-child.value, line=tok.line, col=tok.col)
            return Neg(child=child, line=tok.line, col=tok.col)
        if tok.kind == "+":
            self.advance()
            return self.parse_unary(names, stop_at_opfactor, depth)
        return self.parse_primary(names, stop_at_opfactor, depth)

    def parse_primary(self, names: dict[str, str], stop_at_opfactor: bool, depth: int) -> Expr:
        tok = self.peek()
        if tok.kind in ("REAL", "INT"):
            self.advance()
            return Num(float(tok.text), line=tok.line, col=tok.col)
        if tok.kind == "IDENT":
            if tok.text == "i":
                self.advance()
                return ImagUnit(line=tok.line, col=tok.col)
            if tok.text == "pi":
                self.advance()
                return PiConst(line=tok.line, col=tok.col)
            if self.peek(1).kind == "(":
                if tok.text in OPFACTOR_KINDS:
                    self.error(
                        "operator factors are not allowed inside coefficient "
                        "or frequency expressions",
                        tok,
                        _COEFF_START,
                    )
                self.error("identifiers cannot be called", tok, _COEFF_START)
            declared = names.get(tok.text)
            if declared is None:
                self.error(f"unbound identifier {tok.text!r}", tok)
            if declared != "param":
                self.error(
                    f"identifier {tok.text!r} is a {declared}, not a parameter",
                    tok,
                )
            self.advance()
            return Ref(name=tok.text, line=tok.line, col=tok.col)
        if tok.kind == "(":
            if depth >= MAX_NESTING:
                self.error("expression nesting too deep", tok)
            self.advance()
            node = self.parse_expr(names, stop_at_opfactor=False, depth=depth + 1)
            self.expect(")", "')'")
            return node
        self.error(f"unexpected {describe(tok)}", tok, _COEFF_START)


def describe(tok: Token) -> str:
    if tok.kind == "EOF":
        return "end of input"
    return f"{tok.text!r}"


# ---------------------------------------------------------------------------
# canonicalization and public parse


def parse(text: str) -> HamiltonianSpec:
    """Parse and validate, returning the canonical AST."""
    if not isinstance(text, str):
        raise HspecError("input must be text", 1, 1)
    tokens = tokenize(text)
    modes, qubits, params, term_stmts = _Parser(tokens).parse_spec()
    modes.sort(key=lambda m: m.name)
    qubits.sort(key=lambda q: q.name)
    # Parameters keep declaration order: later bindings may reference
    # earlier ones, and reordering could break that.
    term_stmts.sort(key=_term_sort_key)
    return HamiltonianSpec(tuple(modes), tuple(qubits), tuple(params), tuple(term_stmts))


def _term_sort_key(t: TermStmt):
    return (
        tuple((f.kind, f.target) for f in t.factors),
        serialize_expr(t.frequency) if t.frequency is not None else "",
        serialize_expr(t.coefficient),
        t.hermitian_conjugate,
    )


def load(path) -> HamiltonianSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# serializer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY_PREC = 3


def serialize_expr(node: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(node, Num):
        text = repr(node.value)
        mine = _UNARY_PREC if node.value < 0 else 4
    elif isinstance(node, ImagUnit):
        return "i"
    elif isinstance(node, PiConst):
        return "pi"
    elif isinstance(node, Ref):
        return node.name
    elif isinstance(node, Neg):
        text = "-" + serialize_expr(node.child, _UNARY_PREC)
        mine = _UNARY_PREC
    elif isinstance(node, BinOp):
        mine = _PREC[node.op]
        left = serialize_expr(node.left, mine, right_side=False)
        right = serialize_expr(node.right, mine + 1, right_side=True)
        text = f"{left} {node.op} {right}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    if mine < parent_prec:
        return "(" + text + ")"
    return text


def serialize_factors(factors) -> str:
    return "*".join(f"{f.kind}({f.target})" for f in factors)


def serialize(spec: HamiltonianSpec) -> str:
    """Canonical text; stable under reparsing and whitespace changes."""
    lines = []
    for m in sorted(spec.modes, key=lambda m: m.name):
        lines.append(f"mode {m.name}({m.cutoff});")
    for q in sorted(spec.qubits, key=lambda q: q.name):
        lines.append(f"qubit {q.name};")
    for p in spec.params:
        lines.append(f"param {p.name} = {serialize_expr(p.value)};")
    for t in sorted(spec.term_stmts, key=_term_sort_key):
        coeff = serialize_expr(t.coefficient, _PREC["*"])
        piece = f"term {coeff} * {serialize_factors(t.factors)}"
        if t.frequency is not None:
            piece += f" @ {serialize_expr(t.frequency)}"
        if t.hermitian_conjugate:
            piece += " +h.c."
        piece += ";"
        lines.append(piece)
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# evaluation and lowering


def eval_expr(node: Expr, env: dict[str, complex]) -> complex:
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, ImagUnit):
        return 1j
    if isinstance(node, PiConst):
        return complex(math.pi)
    if isinstance(node, Ref):
        return env[node.name]
    if isinstance(node, Neg):
        return -eval_expr(node.child, env)
    if isinstance(node, BinOp):
        left = eval_expr(node.left, env)
        right = eval_expr(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if right == 0:
            raise HspecError("division by zero", node.line, node.col)
        return left / right
    raise TypeError(f"not an expression node: {node!r}")


def _param_env(spec: HamiltonianSpec) -> dict[str, complex]:
    env: dict[str, complex] = {}
    for p in spec.params:
        env[p.name] = eval_expr(p.value, env)
    return env


def lower(spec: HamiltonianSpec, dimension_limit: int = 4096) -> TermList:
    """Build the term list: operators from the declared space, evaluated
    coefficients and frequencies, conjugate partners from +h.c., and a
    Hermiticity-pairing check over the result.
    """
    from . import hilbert

    try:
        space = make_space(
            [m.cutoff for m in spec.modes], len(spec.qubits), dimension_limit
        )
    except SpaceError as exc:
        raise HspecError(str(exc), 1, 1) from exc
    mode_index = {name: k for k, name in enumerate(spec.mode_names)}
    qubit_index = {name: k for k, name in enumerate(spec.qubit_names)}
    env = _param_env(spec)

    terms: list[HamiltonianTerm] = []
    for stmt in spec.term_stmts:
        coeff = eval_expr(stmt.coefficient, env)
        freq = 0.0
        if stmt.frequency is not None:
            value = eval_expr(stmt.frequency, env)
            scale = max(1.0, abs(value))
            if abs(value.imag) > 1e-12 * scale:
                raise HspecError(
                    f"frequency of term {serialize_factors(stmt.factors)} "
                    f"is not real: {value}",
                    stmt.frequency.line,
                    stmt.frequency.col,
                )
            freq = float(value.real)

        op = None
        for f in stmt.factors:
            if f.kind == "a":
                factor_op = hilbert.annihilator(space, mode_index[f.target])
            elif f.kind == "adag":
                factor_op = hilbert.creator(space, mode_index[f.target])
            else:
                factor_op = hilbert.pauli(
                    space, qubit_index[f.target],
                    {"sp": "plus", "sm": "minus", "sz": "z"}[f.kind],
                )
            op = factor_op if op is None else op @ factor_op

        tag = serialize_factors(stmt.factors)
        base = HamiltonianTerm(op, coeff, freq, tag)
        terms.append(base)
        if stmt.hermitian_conjugate:
            terms.append(base.conjugate_partner())

    tl = TermList(space, tuple(terms))
    try:
        tl.require_hermitian_pairing()
    except PairingError as exc:
        culprit = _first_unpaired(tl)
        hint = f" (term {culprit} has no conjugate partner; add +h.c. or spell it out)" if culprit else ""
        raise HspecError(f"term list is not Hermitian{hint}", 1, 1) from exc
    return tl


def _first_unpaired(tl: TermList) -> str | None:
    import numpy as np

    comps = tl.frequency_components()
    for term in tl.terms:
        partner = comps.get(-term.frequency)
        if partner is None:
            return term.tag or "<unnamed>"
        mine = comps[term.frequency]
        if np.linalg.norm(mine - partner.conj().T) > 1e-9 * max(
            1.0, float(np.linalg.norm(mine))
        ):
            return term.tag or "<unnamed>"
    return None


# ---------------------------------------------------------------------------
# programmatic spec construction (used by the derive command)


def complex_literal(value: complex) -> Expr:
    """Expression tree for a complex constant, e.g. (1.5 - 2.0*i)."""
    value = complex(value)
    re_part = Num(value.real)
    if value.imag == 0:
        return re_part
    im_mag = Num(abs(value.imag))
    im_part = BinOp(op="*", left=im_mag, right=ImagUnit())
    op = "+" if value.imag > 0 else "-"
    if value.real == 0 and value.imag > 0:
        return im_part
    return BinOp(op=op, left=re_part, right=im_part)


def factors_from_tag(tag: str) -> tuple[OpFactor, ...]:
    """Inverse of serialize_factors for canonical tags."""
    factors = []
    for piece in tag.split("*"):
        name, sep, rest = piece.partition("(")
        if not sep or name not in OPFACTOR_KINDS or not rest.endswith(")"):
            raise ValueError(f"not a canonical operator tag: {tag!r}")
        factors.append(OpFactor(name, rest[:-1]))
    return tuple(factors)


def derived_spec(base: HamiltonianSpec, static_terms) -> HamiltonianSpec:
    """Spec for an already-derived static term list: same space
    declarations, literal coefficients, no frequencies.
    """
    stmts = []
    for term in static_terms:
        if term.tag is None:
            raise ValueError("derived terms need operator tags to be printable")
        stmts.append(
            TermStmt(
                coefficient=complex_literal(term.amplitude),
                factors=factors_from_tag(term.tag),
                frequency=None,
                hermitian_conjugate=False,
            )
        )
    return HamiltonianSpec(
        base.modes, base.qubits, (), tuple(sorted(stmts, key=_term_sort_key))
    )
