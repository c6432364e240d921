"""JSON schemas for every CLI subcommand's machine-readable output."""

_GRAPH = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "name"],
                "properties": {
                    "id": {"type": "integer"},
                    "name": {"type": "string"},
                    "role": {
                        "type": "object",
                        "required": ["level", "part"],
                        "properties": {
                            "level": {"type": "integer"},
                            "part": {"type": "string"},
                            "index": {"type": "integer"},
                            "clause": {"type": "integer"},
                            "literal": {"type": "integer"},
                        },
                    },
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"},
                      "minItems": 2, "maxItems": 2},
        },
    },
}

_VERTEX_LIST = {"type": "array", "items": {"type": "integer"}}

_STRATEGY = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["position", "move"],
        "properties": {
            "position": {"type": "object"},
            "move": _VERTEX_LIST,
        },
    },
}

_PLAY = {
    "type": "object",
    "required": ["steps", "outcome"],
    "properties": {
        "steps": {"type": "array", "items": {"type": "object"}},
        "outcome": {"type": ["string", "null"]},
        "reason": {"type": ["string", "null"]},
    },
}

SCHEMAS = {
    "gen": {
        "type": "object",
        "required": ["graph"],
        "properties": {
            "graph": _GRAPH,
            "summary": {"type": "array", "items": {"type": "object"}},
        },
    },
    "solve": {
        "type": "object",
        "required": ["winner", "k", "mode", "positions", "moves"],
        "properties": {
            "winner": {"enum": ["cops", "robber"]},
            "k": {"type": "integer"},
            "mode": {"enum": ["monotone", "raw"]},
            "positions": {"type": "integer"},
            "moves": {"type": "integer"},
            "strategy": _STRATEGY,
        },
    },
    "width": {
        "type": "object",
        "required": ["width", "k_max"],
        "properties": {
            "width": {"type": ["integer", "null"]},
            "exceeds_k_max": {"type": "boolean"},
            "k_max": {"type": "integer"},
        },
    },
    "validate-decomp": {
        "type": "object",
        "required": ["ok"],
        "properties": {
            "ok": {"type": "boolean"},
            "axiom": {"type": ["string", "null"]},
            "witness": {},
            "width": {"type": "integer"},
            "size": {"type": "integer"},
        },
    },
    "validate-ddecomp": {
        "type": "object",
        "required": ["ok"],
        "properties": {
            "ok": {"type": "boolean"},
            "condition": {"type": ["string", "null"]},
            "witness": {},
            "width": {"type": "integer"},
        },
    },
    "strategy-to-decomp": {
        "type": "object",
        "required": ["decomposition", "width", "size"],
        "properties": {
            "decomposition": {"type": "object"},
            "width": {"type": "integer"},
            "size": {"type": "integer"},
        },
    },
    "decomp-to-strategy": {
        "type": "object",
        "required": ["strategy", "cops"],
        "properties": {"strategy": _STRATEGY, "cops": {"type": "integer"}},
    },
    "count-positions": {
        "type": "object",
        "required": ["count"],
        "properties": {"count": {"type": "integer"}, "bound": {"type": "integer"}},
    },
    "kelly": {
        "type": "object",
        "required": ["kelly_width", "order"],
        "properties": {"kelly_width": {"type": "integer"}, "order": _VERTEX_LIST},
    },
    "reduce": {
        "type": "object",
        "required": ["graph", "k_star", "num_vars"],
        "properties": {
            "graph": _GRAPH,
            "k_star": {"type": "integer"},
            "num_vars": {"type": "integer"},
        },
    },
    "qbf-eval": {
        "type": "object",
        "required": ["truth"],
        "properties": {"truth": {"type": "boolean"}},
    },
    "verify-reduction": {
        "type": "object",
        "required": ["truth", "k_star", "agrees"],
        "properties": {
            "truth": {"type": "boolean"},
            "k_star": {"type": "integer"},
            "cops_win": {"type": ["boolean", "null"]},
            "robber_wins_below": {"type": ["boolean", "null"]},
            "agrees": {"type": ["boolean", "null"]},
            "mode": {"enum": ["solve", "scripted"]},
            "verified": {"type": "boolean"},
            "detail": {"type": "object"},
        },
    },
    "play": _PLAY,
}
