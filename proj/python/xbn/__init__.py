"""Explainable Bayesian networks: inference plus explanations of reasoning,
evidence and decisions over discrete networks."""

import json

from ._xbn import (
    DegenerateExplanationError,
    GuardExceededError,
    ImpossibleEvidenceError,
    Network,
    NotFoundError,
    ParseError,
    UsageError,
    ValidationError,
    XbnError,
    approx_equal,
    builtin_asia,
    d_separated,
    evidence_probability,
    load_network,
    parse_network,
)
from . import _xbn

__all__ = [
    "DegenerateExplanationError", "GuardExceededError", "ImpossibleEvidenceError", "Network",
    "NotFoundError", "ParseError", "UsageError", "ValidationError", "XbnError",
    "approx_equal", "builtin_asia", "classify", "d_separated", "decide", "evidence_probability",
    "explain", "gbf", "load_network", "map_query", "mpe", "mre", "oracle", "parse_network",
    "posterior", "query", "render_table", "sdp",
]


def query(network, request):
    """Runs a query request dict; returns the response envelope as a dict."""
    return json.loads(_xbn.execute_json(network, json.dumps(request)))


def render_table(response):
    """Human-readable table for a response returned by query()."""
    return _xbn.render_table_json(json.dumps(response))


def _run(network, operation, evidence, **params):
    request = {"operation": operation, "evidence": evidence or {}}
    request.update({k: v for k, v in params.items() if v is not None})
    return query(network, request)["result"]


def posterior(network, targets, evidence=None):
    """{variable: {state: probability}} for each target given the evidence."""
    return _run(network, "infer", evidence, targets=list(targets))["posterior"]


def classify(network, target, evidence=None):
    return _run(network, "classify", evidence, target=target)


def mpe(network, evidence=None):
    return _run(network, "mpe", evidence)


def map_query(network, targets, evidence=None):
    return _run(network, "map", evidence, targets=list(targets))


def gbf(network, explanation, evidence=None):
    score = _run(network, "gbf", evidence, explanation=explanation)["gbf"]
    return float("inf") if score == "inf" else score


def mre(network, evidence=None, targets="ALL", k=10, prune_dominated=True):
    targets = targets if targets == "ALL" else list(targets)
    return _run(network, "mre", evidence, targets=targets, k=k, prune_dominated=prune_dominated)


def sdp(network, hypothesis, threshold, evidence=None, hidden=()):
    hidden = hidden if hidden == "ALL" else list(hidden)
    return _run(network, "sdp", evidence, hypothesis=hypothesis, threshold=threshold, hidden=hidden)


def decide(network, hypothesis, threshold, evidence=None):
    return _run(network, "decide", evidence, hypothesis=hypothesis, threshold=threshold)


def explain(network, question, evidence=None):
    """Answers a taxonomy question, e.g. {"kind": "WhatWentWrong", "target": "Smoker"}."""
    return _run(network, "explain", evidence, question=question)


def oracle(network, evidence=None, targets="ALL"):
    targets = targets if targets == "ALL" else list(targets)
    return _run(network, "oracle", evidence, targets=targets)
