"""Concrete text syntax for agreements, queries, and a canonical printer.

The DSL mirrors the abstract grammar one-to-one:

    agreement for {Alice, Bob} about ebook
      with count[10] --> and[forEachMember[{Alice, Bob}; count[5]] ==>_id1 display,
                             forEachMember[{Alice, Bob}; count[1]] ==>_id2 print]

`-->` introduces a policy set, `|->` its exclusive form, `==>_id` a policy
(the `_id` tag is optional and glued to the arrow), `prin<count[n]>` a
principal-scoped count.  A bare policy abbreviates `true --> p`, a bare
action abbreviates `true ==> act`.  `#` starts a comment.  Queries read
`may <subject> <action> <asset>`.

Parsing is two-phase: a small expression grammar builds a generic tree,
and elaboration assigns grammar roles (the same `and[...]` text is a policy
conjunction after an arrow but a prerequisite conjunction before one).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from .agreements import (
    ACTION_NAMES,
    TRUE_PRQ,
    Action,
    Agreement,
    AndPolicy,
    AndPolicySet,
    AndPrq,
    AnySeq,
    Asset,
    Attribution,
    Constraint,
    Count,
    ForEachMember,
    Group,
    InSeq,
    NotConstraint,
    NotPolicySet,
    OrPrq,
    Policy,
    PolicyId,
    PolicySet,
    PrePay,
    Prerequisite,
    PrimitivePolicy,
    PrimitivePolicySet,
    PrinCount,
    Principal,
    PrincipalConstraint,
    Requirement,
    Subject,
    TruePrq,
    XorPrq,
)

RESERVED = frozenset(
    """agreement for about with and or xor not true count forEachMember
       prePay attribution inSeq anySeq play print display may""".split()
)

BRACKET_HEADS = frozenset(
    "and or xor not count forEachMember prePay attribution inSeq anySeq".split()
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message}"


class DslParseError(Exception):
    """Parse failure carrying one or more positioned diagnostics."""

    def __init__(self, diagnostics: Iterable[ParseDiagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# --- lexer ------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan
    value: Union[Fraction, str, None] = None


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_'"


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _span(self, start: int, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(start, self.pos, start_line, start_col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _error(self, message: str, start: int, line: int, col: int):
        raise DslParseError([ParseDiagnostic(self._span(start, line, col), message)])

    def tokens(self) -> list[_Token]:
        out = []
        text = self.text
        while True:
            while self.pos < len(text) and (text[self.pos].isspace() or text[self.pos] == "#"):
                if text[self.pos] == "#":
                    while self.pos < len(text) and text[self.pos] != "\n":
                        self._advance()
                else:
                    self._advance()
            if self.pos >= len(text):
                out.append(_Token("EOF", "", self._span(self.pos, self.line, self.col)))
                return out
            start, line, col = self.pos, self.line, self.col
            ch = text[self.pos]
            simple = {
                "{": "LBRACE", "}": "RBRACE", "[": "LBRACK", "]": "RBRACK",
                "(": "LPAREN", ")": "RPAREN", ",": "COMMA", ";": "SEMI",
                "<": "LANGLE", ">": "RANGLE",
            }
            if ch in simple:
                self._advance()
                out.append(_Token(simple[ch], ch, self._span(start, line, col)))
            elif text.startswith("-->", self.pos):
                self._advance(3)
                out.append(_Token("ARROW", "-->", self._span(start, line, col)))
            elif text.startswith("|->", self.pos):
                self._advance(3)
                out.append(_Token("XARROW", "|->", self._span(start, line, col)))
            elif text.startswith("==>", self.pos):
                self._advance(3)
                tag = None
                if self.pos < len(text) and text[self.pos] == "_":
                    self._advance()
                    if self.pos >= len(text) or not _is_ident_start(text[self.pos]):
                        self._error("expected a policy id after '==>_'", start, line, col)
                    tag_start = self.pos
                    while self.pos < len(text) and _is_ident_char(text[self.pos]):
                        self._advance()
                    tag = text[tag_start:self.pos]
                out.append(_Token("DARROW", text[start:self.pos], self._span(start, line, col), tag))
            elif ch.isdigit():
                while self.pos < len(text) and text[self.pos].isdigit():
                    self._advance()
                if self.pos < len(text) and text[self.pos] in "./":
                    sep = text[self.pos]
                    self._advance()
                    if self.pos >= len(text) or not text[self.pos].isdigit():
                        self._error("malformed number", start, line, col)
                    while self.pos < len(text) and text[self.pos].isdigit():
                        self._advance()
                lit = text[start:self.pos]
                try:
                    value = Fraction(lit)
                except ZeroDivisionError:
                    self._error("rational literal with zero denominator", start, line, col)
                out.append(_Token("NUMBER", lit, self._span(start, line, col), value))
            elif _is_ident_start(ch):
                while self.pos < len(text) and _is_ident_char(text[self.pos]):
                    self._advance()
                word = text[start:self.pos]
                out.append(_Token("IDENT", word, self._span(start, line, col), word))
            else:
                self._error(f"unexpected character {ch!r}", start, line, col)


# --- generic parse tree -------------------------------------------------------


@dataclass(frozen=True)
class _GIdent:
    name: str
    span: SourceSpan


@dataclass(frozen=True)
class _GTrue:
    span: SourceSpan


@dataclass(frozen=True)
class _GNumber:
    value: Fraction
    span: SourceSpan


@dataclass(frozen=True)
class _GGroup:
    members: tuple["_GNode", ...]
    span: SourceSpan


@dataclass(frozen=True)
class _GBracket:
    head: str
    items: tuple["_GNode", ...]
    span: SourceSpan
    prin: Optional["_GNode"] = None  # forEachMember's principal slot


@dataclass(frozen=True)
class _GAngleCount:
    base: "_GNode"
    bound: _GNumber
    span: SourceSpan


@dataclass(frozen=True)
class _GArrow:
    lhs: "_GNode"
    exclusive: bool
    rhs: "_GNode"
    span: SourceSpan


@dataclass(frozen=True)
class _GPolicyArrow:
    lhs: "_GNode"
    policy_id: Optional[str]
    rhs: "_GNode"
    span: SourceSpan


_GNode = Union[_GIdent, _GTrue, _GNumber, _GGroup, _GBracket, _GAngleCount, _GArrow, _GPolicyArrow]


class _ParseFail(Exception):
    def __init__(self, message: str, span: SourceSpan):
        self.diagnostic = ParseDiagnostic(span, message)
        super().__init__(message)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.cur
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        if self.cur.kind != kind:
            raise _ParseFail(f"expected {what}, found {self.cur.text or 'end of input'!r}", self.cur.span)
        return self.advance()

    def expect_ident(self, what: str) -> _Token:
        if self.cur.kind != "IDENT":
            raise _ParseFail(f"expected {what}, found {self.cur.text or 'end of input'!r}", self.cur.span)
        return self.advance()

    def expect_keyword(self, word: str) -> _Token:
        if self.cur.kind != "IDENT" or self.cur.text != word:
            raise _ParseFail(f"expected {word!r}, found {self.cur.text or 'end of input'!r}", self.cur.span)
        return self.advance()

    # expression grammar: operand (==>_id operand)? ( --> / |-> operand-with-==>)?

    def parse_expr(self) -> _GNode:
        lhs = self.parse_operand()
        if self.cur.kind in ("ARROW", "XARROW"):
            arrow = self.advance()
            rhs = self.parse_operand()
            return _GArrow(lhs, arrow.kind == "XARROW", rhs, arrow.span)
        return lhs

    def parse_operand(self) -> _GNode:
        lhs = self.parse_postfix()
        if self.cur.kind == "DARROW":
            arrow = self.advance()
            rhs = self.parse_postfix()
            return _GPolicyArrow(lhs, arrow.value, rhs, arrow.span)
        return lhs

    def parse_postfix(self) -> _GNode:
        node = self.parse_primary()
        if self.cur.kind == "LANGLE":
            open_tok = self.advance()
            self.expect_keyword("count")
            self.expect("LBRACK", "'['")
            num = self.expect("NUMBER", "a count bound")
            self.expect("RBRACK", "']'")
            self.expect("RANGLE", "'>'")
            num_node = _GNumber(num.value, num.span)
            return _GAngleCount(node, num_node, open_tok.span)
        return node

    def parse_primary(self) -> _GNode:
        tok = self.cur
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.parse_expr()
            self.expect("RPAREN", "')'")
            return inner
        if tok.kind == "LBRACE":
            self.advance()
            members = [self.parse_expr()]
            while self.cur.kind == "COMMA":
                self.advance()
                members.append(self.parse_expr())
            close = self.expect("RBRACE", "'}'")
            return _GGroup(tuple(members), SourceSpan(tok.span.start, close.span.end, tok.span.line, tok.span.column))
        if tok.kind == "NUMBER":
            self.advance()
            return _GNumber(tok.value, tok.span)
        if tok.kind == "IDENT":
            if tok.text == "true":
                self.advance()
                return _GTrue(tok.span)
            if tok.text in BRACKET_HEADS and self.tokens[self.pos + 1].kind == "LBRACK":
                return self.parse_bracket()
            self.advance()
            return _GIdent(tok.text, tok.span)
        raise _ParseFail(f"expected an expression, found {tok.text or 'end of input'!r}", tok.span)

    def parse_bracket(self) -> _GBracket:
        head = self.advance()
        self.expect("LBRACK", "'['")
        prin = None
        if head.text == "forEachMember":
            prin = self.parse_expr()
            self.expect("SEMI", "';'")
        items = [self.parse_expr()]
        while self.cur.kind == "COMMA":
            self.advance()
            items.append(self.parse_expr())
        close = self.expect("RBRACK", "']'")
        span = SourceSpan(head.span.start, close.span.end, head.span.line, head.span.column)
        return _GBracket(head.text, tuple(items), span, prin)

    def parse_agreement_decl(self) -> tuple[_GNode, _GNode, _GNode]:
        self.expect_keyword("agreement")
        self.expect_keyword("for")
        user = self.parse_expr()
        self.expect_keyword("about")
        asset = self.parse_expr()
        self.expect_keyword("with")
        body = self.parse_expr()
        return user, asset, body


# --- elaboration ---------------------------------------------------------------


class _Elaborator:
    """Assigns grammar roles to generic nodes for one agreement."""

    def __init__(self, agreement_index: int, explicit_ids: set[str]):
        self.agreement_index = agreement_index
        self.used_ids = set(explicit_ids)
        self.auto_counter = 0

    def fresh_id(self) -> PolicyId:
        while True:
            self.auto_counter += 1
            candidate = f"agr{self.agreement_index}_p{self.auto_counter}"
            if candidate not in self.used_ids:
                self.used_ids.add(candidate)
                return PolicyId(candidate)

    def _snapshot(self):
        return self.auto_counter, set(self.used_ids)

    def _restore(self, snap):
        self.auto_counter, self.used_ids = snap[0], set(snap[1])

    def name(self, g: _GNode, what: str) -> str:
        if not isinstance(g, _GIdent):
            raise _ParseFail(f"expected {what}", _span_of(g))
        if g.name in RESERVED:
            raise _ParseFail(f"{g.name!r} is a reserved word and cannot name a {what}", g.span)
        return g.name

    def principal(self, g: _GNode) -> Principal:
        if isinstance(g, _GIdent):
            return Subject(self.name(g, "subject"))
        if isinstance(g, _GGroup):
            if not g.members:
                raise _ParseFail("groups must be nonempty", g.span)
            return Group(self.principal(m) for m in g.members)
        raise _ParseFail("expected a principal (a subject or {group})", _span_of(g))

    def action(self, g: _GNode) -> Action:
        if isinstance(g, _GIdent) and g.name in ACTION_NAMES:
            return ACTION_NAMES[g.name]
        raise _ParseFail("unknown action (expected play, print, or display)", _span_of(g))

    def natural(self, g: _GNode, what: str) -> int:
        if isinstance(g, _GNumber) and g.value.denominator == 1 and g.value >= 0:
            return int(g.value)
        raise _ParseFail(f"{what} must be a natural number", _span_of(g))

    def policy_set(self, g: _GNode) -> PolicySet:
        if isinstance(g, _GArrow):
            return PrimitivePolicySet(
                self.prerequisite(g.lhs), self.policy(g.rhs), exclusive=g.exclusive
            )
        if isinstance(g, _GBracket) and g.head == "and":
            # prefer one policy conjunction (Ex. "and[p1, p2]" means
            # true --> and[p1, p2]); fall back to a conjunction of sets
            snap = self._snapshot()
            try:
                return PrimitivePolicySet(TRUE_PRQ, AndPolicy(self.policy(m) for m in g.items))
            except _ParseFail:
                self._restore(snap)
                return AndPolicySet(self.policy_set(m) for m in g.items)
        return PrimitivePolicySet(TRUE_PRQ, self.policy(g))

    def policy(self, g: _GNode) -> Policy:
        if isinstance(g, _GPolicyArrow):
            pid = PolicyId(g.policy_id) if g.policy_id is not None else self.fresh_id()
            return PrimitivePolicy(self.prerequisite(g.lhs), pid, self.action(g.rhs))
        if isinstance(g, _GBracket) and g.head == "and":
            return AndPolicy(self.policy(m) for m in g.items)
        if isinstance(g, _GIdent) and g.name in ACTION_NAMES:
            return PrimitivePolicy(TRUE_PRQ, self.fresh_id(), ACTION_NAMES[g.name])
        raise _ParseFail("expected a policy", _span_of(g))

    def constraint(self, g: _GNode) -> Constraint:
        if isinstance(g, _GAngleCount):
            return PrinCount(self.principal(g.base), self.natural(g.bound, "count bound"))
        if isinstance(g, _GBracket) and g.head == "count":
            if len(g.items) != 1:
                raise _ParseFail("count takes exactly one bound", g.span)
            return Count(self.natural(g.items[0], "count bound"))
        if isinstance(g, _GBracket) and g.head == "forEachMember":
            return ForEachMember(
                self.principal(g.prin), (self.constraint(m) for m in g.items)
            )
        if isinstance(g, (_GIdent, _GGroup)):
            return PrincipalConstraint(self.principal(g))
        raise _ParseFail("expected a constraint", _span_of(g))

    def requirement(self, g: _GNode) -> Requirement:
        if isinstance(g, _GBracket) and g.head == "prePay":
            if len(g.items) != 1 or not isinstance(g.items[0], _GNumber):
                raise _ParseFail("prePay takes exactly one amount", g.span)
            return PrePay(g.items[0].value)
        if isinstance(g, _GBracket) and g.head == "attribution":
            if len(g.items) != 1:
                raise _ParseFail("attribution takes exactly one subject", g.span)
            return Attribution(Subject(self.name(g.items[0], "subject")))
        if isinstance(g, _GBracket) and g.head in ("inSeq", "anySeq"):
            steps = (self.requirement(m) for m in g.items)
            return InSeq(steps) if g.head == "inSeq" else AnySeq(steps)
        raise _ParseFail("expected a requirement", _span_of(g))

    def prerequisite(self, g: _GNode) -> Prerequisite:
        if isinstance(g, _GTrue):
            return TRUE_PRQ
        if isinstance(g, _GBracket):
            if g.head == "and":
                return AndPrq(self.prerequisite(m) for m in g.items)
            if g.head == "or":
                return OrPrq(self.prerequisite(m) for m in g.items)
            if g.head == "xor":
                return XorPrq(self.prerequisite(m) for m in g.items)
            if g.head == "not":
                if len(g.items) != 1:
                    raise _ParseFail("not takes exactly one argument", g.span)
                try:
                    return NotConstraint(self.constraint(g.items[0]))
                except _ParseFail:
                    pass
                snap = self._snapshot()
                try:
                    return NotPolicySet(self.policy_set(g.items[0]))
                except _ParseFail:
                    self._restore(snap)
                    raise _ParseFail(
                        "not[...] takes a constraint or a policy set", g.span
                    ) from None
            if g.head in ("prePay", "attribution", "inSeq", "anySeq"):
                return self.requirement(g)
            if g.head in ("count", "forEachMember"):
                return self.constraint(g)
        if isinstance(g, (_GIdent, _GGroup, _GAngleCount)):
            return self.constraint(g)
        raise _ParseFail("expected a prerequisite", _span_of(g))


def _span_of(g: _GNode) -> SourceSpan:
    return g.span


def _collect_explicit_ids(g: _GNode, agr_span: SourceSpan) -> set[str]:
    found: dict[str, SourceSpan] = {}

    def walk(node: _GNode):
        if isinstance(node, _GPolicyArrow):
            if node.policy_id is not None:
                if node.policy_id in found:
                    raise _ParseFail(
                        f"duplicate policy id {node.policy_id!r} within one agreement",
                        node.span,
                    )
                found[node.policy_id] = node.span
            walk(node.lhs)
            walk(node.rhs)
        elif isinstance(node, _GArrow):
            walk(node.lhs)
            walk(node.rhs)
        elif isinstance(node, _GGroup):
            for m in node.members:
                walk(m)
        elif isinstance(node, _GBracket):
            if node.prin is not None:
                walk(node.prin)
            for m in node.items:
                walk(m)
        elif isinstance(node, _GAngleCount):
            walk(node.base)

    walk(g)
    return set(found)


def _elaborate_agreement(
    user_g: _GNode, asset_g: _GNode, body_g: _GNode, index: int
) -> Agreement:
    elab = _Elaborator(index, _collect_explicit_ids(body_g, _span_of(body_g)))
    user = elab.principal(user_g)
    asset = Asset(elab.name(asset_g, "asset"))
    body = elab.policy_set(body_g)
    try:
        return Agreement(user, asset, body)
    except ValueError as exc:
        raise _ParseFail(str(exc), _span_of(body_g)) from None


def parse_agreements(text: str) -> tuple[Agreement, ...]:
    """Parse a file of agreement declarations.

    On errors, recovery skips to the next `agreement` keyword so one pass
    reports a diagnostic per broken declaration.
    """
    parser = _Parser(_Lexer(text).tokens())
    agreements = []
    diagnostics = []
    index = 0
    while parser.cur.kind != "EOF":
        index += 1
        try:
            user_g, asset_g, body_g = parser.parse_agreement_decl()
            agreements.append(_elaborate_agreement(user_g, asset_g, body_g, index))
        except _ParseFail as exc:
            diagnostics.append(exc.diagnostic)
            while parser.cur.kind != "EOF" and not (
                parser.cur.kind == "IDENT" and parser.cur.text == "agreement"
            ):
                parser.advance()
    if diagnostics:
        raise DslParseError(diagnostics)
    return tuple(agreements)


def parse_agreement(text: str) -> Agreement:
    """Parse exactly one agreement."""
    agreements = parse_agreements(text)
    if len(agreements) != 1:
        raise DslParseError(
            [
                ParseDiagnostic(
                    SourceSpan(0, len(text), 1, 1),
                    f"expected exactly one agreement, found {len(agreements)}",
                )
            ]
        )
    return agreements[0]


def parse_query(text: str) -> tuple[Subject, Action, Asset]:
    """Parse `may <subject> <action> <asset>`."""
    parser = _Parser(_Lexer(text).tokens())
    try:
        parser.expect_keyword("may")
        subject_tok = parser.expect_ident("a subject")
        if subject_tok.text in RESERVED:
            raise _ParseFail(f"{subject_tok.text!r} cannot name a subject", subject_tok.span)
        action_tok = parser.expect_ident("an action")
        if action_tok.text not in ACTION_NAMES:
            raise _ParseFail("unknown action (expected play, print, or display)", action_tok.span)
        asset_tok = parser.expect_ident("an asset")
        if asset_tok.text in RESERVED:
            raise _ParseFail(f"{asset_tok.text!r} cannot name an asset", asset_tok.span)
        parser.expect("EOF", "end of query")
    except _ParseFail as exc:
        raise DslParseError([exc.diagnostic]) from None
    return Subject(subject_tok.text), ACTION_NAMES[action_tok.text], Asset(asset_tok.text)


# --- canonical printer ----------------------------------------------------------


def _fmt_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def pretty_principal(prin: Principal) -> str:
    if isinstance(prin, Subject):
        return prin.name
    return "{" + ", ".join(pretty_principal(m) for m in prin.members) + "}"


def _pp_constraint(c: Constraint) -> str:
    if isinstance(c, PrincipalConstraint):
        return pretty_principal(c.principal)
    if isinstance(c, Count):
        return f"count[{c.bound}]"
    if isinstance(c, PrinCount):
        return f"{pretty_principal(c.principal)}<count[{c.bound}]>"
    if isinstance(c, ForEachMember):
        inner = ", ".join(_pp_constraint(x) for x in c.constraints)
        return f"forEachMember[{pretty_principal(c.principal)}; {inner}]"
    raise TypeError(f"not a constraint: {c!r}")


def _pp_requirement(r: Requirement) -> str:
    if isinstance(r, PrePay):
        return f"prePay[{_fmt_rational(r.amount)}]"
    if isinstance(r, Attribution):
        return f"attribution[{r.subject.name}]"
    if isinstance(r, InSeq):
        return "inSeq[" + ", ".join(_pp_requirement(s) for s in r.steps) + "]"
    if isinstance(r, AnySeq):
        return "anySeq[" + ", ".join(_pp_requirement(s) for s in r.steps) + "]"
    raise TypeError(f"not a requirement: {r!r}")


def pretty_prerequisite(prq: Prerequisite) -> str:
    if isinstance(prq, TruePrq):
        return "true"
    if isinstance(prq, (PrincipalConstraint, ForEachMember, Count, PrinCount)):
        return _pp_constraint(prq)
    if isinstance(prq, (PrePay, Attribution, InSeq, AnySeq)):
        return _pp_requirement(prq)
    if isinstance(prq, NotConstraint):
        return f"not[{_pp_constraint(prq.constraint)}]"
    if isinstance(prq, NotPolicySet):
        return f"not[{pretty_policy_set(prq.policy_set)}]"
    if isinstance(prq, AndPrq):
        return "and[" + ", ".join(pretty_prerequisite(i) for i in prq.items) + "]"
    if isinstance(prq, OrPrq):
        return "or[" + ", ".join(pretty_prerequisite(i) for i in prq.items) + "]"
    if isinstance(prq, XorPrq):
        return "xor[" + ", ".join(pretty_prerequisite(i) for i in prq.items) + "]"
    raise TypeError(f"not a prerequisite: {prq!r}")


def pretty_policy(p: Policy) -> str:
    if isinstance(p, PrimitivePolicy):
        return f"{pretty_prerequisite(p.prereq)} ==>_{p.policy_id.name} {p.action.value}"
    return "and[" + ", ".join(pretty_policy(x) for x in p.policies) + "]"


def pretty_policy_set(ps: PolicySet) -> str:
    if isinstance(ps, PrimitivePolicySet):
        arrow = "|->" if ps.exclusive else "-->"
        rhs = pretty_policy(ps.policy)
        if isinstance(ps.policy, PrimitivePolicy):
            rhs = f"({rhs})"
        return f"{pretty_prerequisite(ps.prereq)} {arrow} {rhs}"
    return "and[" + ", ".join(pretty_policy_set(s) for s in ps.sets) + "]"


def pretty(agr: Agreement) -> str:
    """Deterministic canonical rendering; re-parses to an equal agreement."""
    return (
        f"agreement for {pretty_principal(agr.user)} "
        f"about {agr.asset.name} with {pretty_policy_set(agr.body)}"
    )


def pretty_query(subject: Subject, action: Action, asset: Asset) -> str:
    return f"may {subject.name} {action.value} {asset.name}"
