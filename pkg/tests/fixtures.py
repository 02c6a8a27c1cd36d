"""Hand-built histories and traces: for each checked property, one
violating history and one legal twin."""


def _op(op, kind, proc, invoke, response, value):
    return {"op": op, "kind": kind, "proc": proc, "invoke": invoke, "response": response, "value": value}


# Property 1, case A: a completed write precedes a read that still
# returns the initial value.
P1_BAD_INITIAL = [
    _op(0, "write", 1, 0, 5, [1, "a"]),
    _op(1, "read", 2, 10, 15, [0, None]),
]
P1_OK_INITIAL = [
    _op(0, "write", 1, 0, 5, [1, "a"]),
    _op(1, "read", 2, 10, 15, [1, "a"]),
]

# Property 1, case B: a read skips over the intervening write and
# returns a stale value.
P1_BAD_STALE = [
    _op(0, "write", 1, 0, 5, [1, "a"]),
    _op(1, "write", 1, 6, 11, [2, "b"]),
    _op(2, "read", 3, 12, 20, [1, "a"]),
]
P1_OK_STALE = [
    _op(0, "write", 1, 0, 5, [1, "a"]),
    _op(1, "write", 1, 6, 11, [2, "b"]),
    _op(2, "read", 3, 12, 20, [2, "b"]),
]

# Property 2, case A: a later read returns an older written value.
P2_BAD_ORDER = [
    _op(0, "read", 2, 0, 5, [2, "b"]),
    _op(1, "read", 3, 6, 10, [1, "a"]),
]
P2_OK_ORDER = [
    _op(0, "read", 2, 0, 5, [1, "a"]),
    _op(1, "read", 3, 6, 10, [2, "b"]),
]

# Property 2, case B: a later read falls back to the initial value.
P2_BAD_INITIAL = [
    _op(0, "read", 2, 0, 5, [1, "a"]),
    _op(1, "read", 3, 6, 10, [0, None]),
]
# Legal twin: the reads are concurrent, so no order is imposed.
P2_OK_CONCURRENT = [
    _op(0, "read", 2, 0, 5, [1, "a"]),
    _op(1, "read", 3, 4, 10, [0, None]),
]


def _regwrite(step, actor, reg, value):
    return {"step": step, "kind": "reg-write", "actor": actor, "payload": {"register": list(reg), "value": list(value)}}


# Register monotonicity: written sequence numbers must not decrease.
MONO_BAD_TRACE = [
    _regwrite(0, 1, (1, 1), [3, "c"]),
    _regwrite(1, 1, (1, 1), [2, "b"]),
]
MONO_OK_TRACE = [
    _regwrite(0, 1, (1, 1), [1, "a"]),
    _regwrite(1, 1, (1, 1), [3, "c"]),
]

# Completion: an operation of a surviving process never responded.
LIVE_BAD_HISTORY = [
    _op(0, "write", 1, 0, 5, [1, "a"]),
    _op(1, "read", 2, 6, None, None),
]
LIVE_BAD_CRASHED = set()
# Legal twin: the stuck process crashed, so its pending read is exempt.
LIVE_OK_HISTORY = LIVE_BAD_HISTORY
LIVE_OK_CRASHED = {2}
