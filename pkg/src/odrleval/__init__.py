"""Rights-expression evaluation: an ODRL-style agreement DSL, a translation
to many-sorted first-order logic, and four-way permission queries answered by
both a general decision procedure and a polynomial-time route for agreements
without suspended policy sets."""

__version__ = "0.1.0"

from .agreements import (
    Action,
    Agreement,
    Asset,
    PolicyId,
    Subject,
    ids,
    in_fragment_q1,
    principals,
    subjects,
)
from .engine import (
    PHRASES,
    Query,
    Verdict,
    VerdictKind,
    answer,
    answer_general,
    answer_tractable,
    holds,
    req_holds,
)
from .environment import (
    EMPTY_ENVIRONMENT,
    Environment,
    check_consistent,
    format_environment,
    lookup_count,
    parse_environment,
)
from .fol import ResourceLimitExceeded, render_sexpr
from .oracle import evalid, enumerate_models, oracle_verdict
from .parser import (
    DslParseError,
    parse_agreement,
    parse_agreements,
    parse_query,
    pretty,
)
from .reduction import Cnf3, parse_dimacs, reduce_cnf, sat_bruteforce
from .translate import SeqInterpretation, translate_agreement

__all__ = [
    "Action",
    "Agreement",
    "Asset",
    "Cnf3",
    "DslParseError",
    "EMPTY_ENVIRONMENT",
    "Environment",
    "PHRASES",
    "PolicyId",
    "Query",
    "ResourceLimitExceeded",
    "SeqInterpretation",
    "Subject",
    "Verdict",
    "VerdictKind",
    "answer",
    "answer_general",
    "answer_tractable",
    "check_consistent",
    "enumerate_models",
    "evalid",
    "format_environment",
    "holds",
    "ids",
    "in_fragment_q1",
    "lookup_count",
    "oracle_verdict",
    "parse_agreement",
    "parse_agreements",
    "parse_dimacs",
    "parse_environment",
    "parse_query",
    "pretty",
    "principals",
    "reduce_cnf",
    "render_sexpr",
    "req_holds",
    "sat_bruteforce",
    "subjects",
    "translate_agreement",
]
