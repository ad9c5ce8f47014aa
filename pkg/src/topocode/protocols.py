"""Deterministic simulations of the topology-based key-pair protocols.

Encryption is a deliberately toy additive keystream over bytes (mod 256)
keyed by digit strings; each layer carries a magic prefix and a payload
hash so that peeling layers out of order, or with the wrong key, fails.
Graphs key a layer through their row-major Topcode string.  Public/private
pairs come from every-zero groups: authentication recomputes the
registered signature element through the i+j-zero index law, and a
decryptor derives the counterpart element the same way, so corrupting any
single component breaks the first step that touches it.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .graphs import ColoredGraph, CoincideRule, Graph, GraphError, vertex_coincide
from .strings import DigitString, build_shift_group
from .topcode import string_from_topcode, topcode_from_graph
from .groups import CompoundStringGroup, group_compound


class ProtocolError(ValueError):
    pass


class LayerError(ProtocolError):
    """A cipher layer failed to open: wrong key, wrong order, or tampering."""


class Direction(Enum):
    ENCRYPT = "encrypt"
    DECRYPT = "decrypt"


def keystream_cipher(data: bytes, key: DigitString, direction: Direction) -> bytes:
    """Shift byte i by the key digit at i mod len(key), mod 256."""
    if len(key) == 0:
        raise ProtocolError("empty cipher key")
    sign = 1 if direction is Direction.ENCRYPT else -1
    digits = key.digits
    n = len(digits)
    return bytes((b + sign * digits[i % n]) % 256 for i, b in enumerate(data))


_MAGIC = b"TPC1"


def seal(payload: bytes, key: DigitString) -> bytes:
    """One encryption layer: magic + payload hash + payload, keystreamed."""
    body = _MAGIC + hashlib.sha256(payload).digest() + payload
    return keystream_cipher(body, key, Direction.ENCRYPT)


def unseal(blob: bytes, key: DigitString) -> bytes:
    body = keystream_cipher(blob, key, Direction.DECRYPT)
    if body[:4] != _MAGIC:
        raise LayerError("layer magic mismatch: wrong key or wrong order")
    digest, payload = body[4:36], body[36:]
    if hashlib.sha256(payload).digest() != digest:
        raise LayerError("layer hash mismatch: payload corrupted")
    return payload


def graph_key_string(cg: ColoredGraph) -> DigitString:
    """A colored graph keys a cipher through its row-major Topcode string."""
    return string_from_topcode(topcode_from_graph(cg))


def _digest(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Key pairs and authentication records.
# ---------------------------------------------------------------------------


class AuthKind(Enum):
    GROUP_OP = "group-op"
    GRAPH_COINCIDE = "graph-coincide"
    STRING_TWIN = "string-twin"


@dataclass
class AuthRecord:
    kind: AuthKind
    inputs: tuple[str, ...]
    result: str
    verdict: bool


@dataclass
class GroupKeyPair:
    """Indices into an every-zero group; the signature is the group element
    at (pub + pri - zero) mod order, fixed at registration time."""

    group_id: str
    order: int
    pub_index: int
    pri_index: int
    signature_index: int

    @staticmethod
    def issue(group_id: str, order: int, pub: int, pri: int, zero: int) -> "GroupKeyPair":
        return GroupKeyPair(group_id, order, pub, pri, (pub + pri - zero) % order)

    def authenticate(self, zero: int) -> AuthRecord:
        computed = (self.pub_index + self.pri_index - zero) % self.order
        return AuthRecord(
            AuthKind.GROUP_OP,
            (f"{self.group_id}[{self.pub_index}]", f"{self.group_id}[{self.pri_index}]", f"zero={zero}"),
            f"{self.group_id}[{computed}]",
            computed == self.signature_index,
        )

    def derive_counterpart(self, known_index: int, zero: int) -> int:
        """Given one side's index, the other side via the registered signature."""
        return (self.signature_index - known_index + zero) % self.order


@dataclass
class PartitionKeyPair:
    """Twin-refinement strings: two adjacent parts of a sum (or factors of a
    product) each refined; the authentication string interleaves both
    refinements between the untouched parts."""

    target: int
    parts: tuple[int, ...]
    position: int  # refine parts[position] (public) and parts[position+1] (private)
    public_refinement: tuple[int, ...]
    private_refinement: tuple[int, ...]
    mode: str  # 'sum' or 'product'

    def __post_init__(self) -> None:
        import math

        combine = sum if self.mode == "sum" else math.prod
        if combine(self.parts) != self.target:
            raise ProtocolError(f"parts do not {self.mode} to {self.target}")
        if combine(self.public_refinement) != self.parts[self.position]:
            raise ProtocolError("public refinement does not rebuild its part")
        if combine(self.private_refinement) != self.parts[self.position + 1]:
            raise ProtocolError("private refinement does not rebuild its part")

    def public_string(self) -> DigitString:
        return self._assemble({self.position: self.public_refinement})

    def private_string(self) -> DigitString:
        return self._assemble({self.position + 1: self.private_refinement})

    def authentication_string(self) -> DigitString:
        return self._assemble(
            {self.position: self.public_refinement, self.position + 1: self.private_refinement}
        )

    def _assemble(self, refined: Mapping[int, tuple[int, ...]]) -> DigitString:
        pieces: list[str] = []
        for i, part in enumerate(self.parts):
            if i in refined:
                pieces.extend(str(v) for v in refined[i])
            else:
                pieces.append(str(part))
        return DigitString.parse("".join(pieces))

    def authenticate(self) -> AuthRecord:
        rebuilt = self._assemble(
            {self.position: self.public_refinement, self.position + 1: self.private_refinement}
        )
        expected = self.authentication_string()
        return AuthRecord(
            AuthKind.STRING_TWIN,
            (str(self.public_string()), str(self.private_string())),
            str(rebuilt),
            rebuilt == expected,
        )


def bipartite_keypair(m: int, n: int, public_edges: Iterable[tuple[int, int]]) -> tuple[Graph, Graph]:
    """Public subgraph of K_{m,n} and its edge complement as the private part."""
    host = Graph.complete_bipartite(m, n)
    pub = Graph.build(host.vertices, public_edges)
    if not pub.edges <= host.edges:
        raise ProtocolError("public edges must lie inside the complete bipartite host")
    pri = Graph.build(host.vertices, host.edges - pub.edges)
    return pub, pri


def authenticate_coincide(
    parts: Sequence[ColoredGraph], target: Graph
) -> AuthRecord:
    """Graph-mode authentication: the parts must coincide by color onto the
    target with pairwise-disjoint edge sets."""
    inputs = tuple(_digest(json.dumps(p.to_json(), sort_keys=True)) for p in parts)
    try:
        merged = vertex_coincide(list(parts), CoincideRule.BY_COLOR)
    except GraphError as exc:
        return AuthRecord(AuthKind.GRAPH_COINCIDE, inputs, f"error: {exc}", False)
    ok = merged.graph == target
    return AuthRecord(
        AuthKind.GRAPH_COINCIDE,
        inputs,
        _digest(json.dumps(merged.graph.to_json(), sort_keys=True)),
        ok,
    )


# ---------------------------------------------------------------------------
# The shared protocol context: one string group, one graphic group, and the
# registered key pairs of the two actors.
# ---------------------------------------------------------------------------

STRING_GROUP_ORDER = 9
GRAPH_GROUP_ORDER = 6


def _p3_graceful_base() -> ColoredGraph:
    g = Graph.path(3)
    return ColoredGraph(g, {1: 0, 2: 2, 3: 1}, {(1, 2): 2, (2, 3): 1})


@dataclass
class ProtocolContext:
    """Deterministic key material shared by the protocol simulations."""

    seed: int
    string_elements: tuple[DigitString, ...] = ()
    string_zero: int = 0
    graph_group: CompoundStringGroup | None = None
    graph_elements: tuple[ColoredGraph, ...] = ()
    graph_zero: int = 0
    pairs: dict[str, GroupKeyPair] = field(default_factory=dict)

    @staticmethod
    def create(seed: int) -> "ProtocolContext":
        rng = random.Random(seed)
        seed_digits = "".join(str(rng.randint(1, 8)) for _ in range(8))
        sgroup = build_shift_group(
            DigitString.parse(seed_digits), k=1, m=STRING_GROUP_ORDER
        )
        graphic, _, compound = group_compound(_p3_graceful_base(), GRAPH_GROUP_ORDER)
        ctx = ProtocolContext(
            seed=seed,
            string_elements=sgroup.elements,
            string_zero=rng.randrange(STRING_GROUP_ORDER),
            graph_group=compound,
            graph_elements=tuple(
                graphic.element(t, t) for t in range(GRAPH_GROUP_ORDER)
            ),
            graph_zero=rng.randrange(GRAPH_GROUP_ORDER),
        )
        for actor in ("alice", "bob"):
            for kind, order, zero in (
                ("string", STRING_GROUP_ORDER, ctx.string_zero),
                ("graph", GRAPH_GROUP_ORDER, ctx.graph_zero),
            ):
                pub = rng.randrange(order)
                pri = rng.randrange(order)
                ctx.pairs[f"{actor}-{kind}"] = GroupKeyPair.issue(
                    f"{kind}-group", order, pub, pri, zero
                )
        return ctx

    def string_at(self, index: int) -> DigitString:
        return self.string_elements[index % STRING_GROUP_ORDER]

    def graph_at(self, index: int) -> ColoredGraph:
        return self.graph_elements[index % GRAPH_GROUP_ORDER]

    def key_of(self, pair_name: str, side: str) -> DigitString:
        """The layer key of one side of a registered pair."""
        pair = self.pairs[pair_name]
        index = pair.pub_index if side == "pub" else pair.pri_index
        if pair.group_id == "string-group":
            return self.string_at(index)
        return graph_key_string(self.graph_at(index))

    def derived_key(self, pair_name: str, known_side: str) -> DigitString:
        """Derive the *other* side's layer key from the known side, the
        registered signature, and the group zero."""
        pair = self.pairs[pair_name]
        zero = self.string_zero if pair.group_id == "string-group" else self.graph_zero
        known = pair.pub_index if known_side == "pub" else pair.pri_index
        other = pair.derive_counterpart(known, zero)
        if pair.group_id == "string-group":
            return self.string_at(other)
        return graph_key_string(self.graph_at(other))

    def zero_of(self, pair_name: str) -> int:
        pair = self.pairs[pair_name]
        return self.string_zero if pair.group_id == "string-group" else self.graph_zero


def rotate_zero(ctx: ProtocolContext, group_id: str, new_zero: int) -> None:
    """Replace the common zero and re-issue every signature under it.

    Authentication records computed before the rotation no longer verify."""
    if group_id == "string-group":
        if not 0 <= new_zero < STRING_GROUP_ORDER:
            raise ProtocolError("zero outside the string group")
        ctx.string_zero = new_zero
    elif group_id == "graph-group":
        if not 0 <= new_zero < GRAPH_GROUP_ORDER:
            raise ProtocolError("zero outside the graph group")
        ctx.graph_zero = new_zero
    else:
        raise ProtocolError(f"unknown group {group_id!r}")
    for name, pair in ctx.pairs.items():
        if pair.group_id == group_id:
            ctx.pairs[name] = GroupKeyPair.issue(
                pair.group_id, pair.order, pair.pub_index, pair.pri_index, new_zero
            )


# ---------------------------------------------------------------------------
# Transcripts.
# ---------------------------------------------------------------------------


@dataclass
class TranscriptStep:
    step: str
    actor: str
    action: str
    payload_digest: str


@dataclass
class ProtocolTranscript:
    protocol_id: str
    seed: int
    steps: list[TranscriptStep] = field(default_factory=list)
    verdict: bool = False
    failing_step: str | None = None
    layers: list[str] = field(default_factory=list)  # key texts, innermost first
    ciphertext: bytes = b""

    def log(self, step: str, actor: str, action: str, payload: bytes | str = b"") -> None:
        self.steps.append(TranscriptStep(step, actor, action, _digest(payload)))

    def to_jsonl(self) -> str:
        lines = []
        for s in self.steps:
            lines.append(
                json.dumps(
                    {"step": s.step, "actor": s.actor, "action": s.action, "sha256": s.payload_digest}
                )
            )
        lines.append(
            json.dumps(
                {"verdict": self.verdict, "failing_step": self.failing_step, "protocol": self.protocol_id}
            )
        )
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return _digest(self.to_jsonl())


class _Abort(Exception):
    def __init__(self, step: str, reason: str):
        super().__init__(reason)
        self.step = step
        self.reason = reason


Tamper = Mapping[str, Callable[[bytes], bytes]]


@dataclass
class _Run:
    """Shared bookkeeping for one protocol execution."""

    transcript: ProtocolTranscript
    ctx: ProtocolContext
    tamper: Tamper

    def artifact(self, name: str, blob: bytes) -> bytes:
        if name in self.tamper:
            blob = self.tamper[name](blob)
        return blob

    def seal_layer(self, blob: bytes, key: DigitString) -> bytes:
        self.transcript.layers.append(str(key))
        return seal(blob, key)

    def open_layer(self, step: str, actor: str, action: str, blob: bytes, key: DigitString) -> bytes:
        try:
            out = unseal(blob, key)
        except LayerError as exc:
            raise _Abort(step, f"{action}: {exc}") from exc
        self.transcript.log(step, actor, action, out)
        return out

    def check_auth(self, step: str, actor: str, record: AuthRecord, action: str) -> None:
        self.transcript.log(step, actor, f"{action} -> {record.result}", record.result)
        if not record.verdict:
            raise _Abort(step, f"{action} failed")

    def auth_pair(self, step: str, actor: str, pair_name: str) -> None:
        pair = self.ctx.pairs[pair_name]
        record = pair.authenticate(self.ctx.zero_of(pair_name))
        self.check_auth(step, actor, record, f"authenticate {pair_name}")


# ---------------------------------------------------------------------------
# Example-1 material: the public tree G and private trees T, J of K_6.
# ---------------------------------------------------------------------------

EXAMPLE1_G = {(1, 5): 4, (3, 5): 2, (5, 6): 1, (2, 6): 4, (4, 6): 2}
EXAMPLE1_T = {(4, 5): 1, (2, 4): 2, (1, 4): 3, (1, 6): 5, (1, 3): 2}
EXAMPLE1_J = {(1, 2): 1, (2, 5): 3, (2, 3): 1, (3, 4): 1, (3, 6): 3}
EXAMPLE1_ORDERS = {
    "G": [(1, 5), (3, 5), (5, 6), (2, 6), (4, 6)],
    "T": [(4, 5), (2, 4), (1, 4), (1, 6), (1, 3)],
    "J": [(1, 2), (2, 5), (2, 3), (3, 4), (3, 6)],
}


def example1_tree(edge_map: Mapping[tuple[int, int], int]) -> ColoredGraph:
    g = Graph.build(range(1, 7), edge_map.keys())
    return ColoredGraph(g, {v: v for v in range(1, 7)}, dict(edge_map))


def example1_string(name: str) -> DigitString:
    tree = example1_tree({"G": EXAMPLE1_G, "T": EXAMPLE1_T, "J": EXAMPLE1_J}[name])
    return string_from_topcode(topcode_from_graph(tree, EXAMPLE1_ORDERS[name]))


_ASSIGNMENT_TABLE = {1: "142857", 2: "6174", 3: "0618", 4: "31415926", 5: "8128", 6: "196"}


def _assignment_from_string(base: DigitString, key_source: DigitString) -> DigitString:
    """An assignment-style public key: every digit of the base expands to the
    key source rotated by that digit."""
    text = str(key_source)
    pieces = []
    for d in base.digits:
        r = d % len(text)
        pieces.append(text[r:] + text[:r])
    return DigitString.parse("".join(pieces))


# ---------------------------------------------------------------------------
# Protocol bodies.  Each takes (run, material) and must set run.transcript
# fields; the plaintext round-trip check happens in run_protocol.
# ---------------------------------------------------------------------------


def _material_plaintext(material: Mapping) -> bytes:
    plain = material.get("plaintext", b"attack at dawn")
    if isinstance(plain, str):
        plain = plain.encode()
    return plain


def _proto_top_en_1(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    plain = _material_plaintext(material)
    g = material.get("public_tree", example1_tree(EXAMPLE1_G))
    privates = material.get("private_trees", [example1_tree(EXAMPLE1_T), example1_tree(EXAMPLE1_J)])
    target = material.get("target", Graph.complete(6))
    orders = material.get("edge_orders", [EXAMPLE1_ORDERS["G"], EXAMPLE1_ORDERS["T"], EXAMPLE1_ORDERS["J"]])

    s_pub = string_from_topcode(topcode_from_graph(g, orders[0]))
    doc = run.artifact("encrypted", run.seal_layer(plain, s_pub))
    t.ciphertext = doc
    t.log("init", "alice", f"encrypt with s_pub={s_pub}", doc)

    t.log("step-1", "alice", f"private-key graphs located: {len(privates)}")
    pri_strings = [
        string_from_topcode(topcode_from_graph(p, order))
        for p, order in zip(privates, orders[1:])
    ]
    t.log("step-2", "alice", "private strings " + " / ".join(str(s) for s in pri_strings))

    record = authenticate_coincide([g] + list(privates), target)
    run.check_auth("step-3", "alice", record, "coincide onto the target graph")

    recovered = run.open_layer("step-4", "alice", f"decrypt with authenticated s_pub={s_pub}", doc, s_pub)
    return recovered


def _proto_top_en_2(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    plain = _material_plaintext(material)
    g = material.get("public_tree", example1_tree(EXAMPLE1_G))
    privates = material.get("private_trees", [example1_tree(EXAMPLE1_T), example1_tree(EXAMPLE1_J)])
    target = material.get("target", Graph.complete(6))
    table = material.get("assignment_table", _ASSIGNMENT_TABLE)

    from .topcode import assignment_substitute

    s_pub = string_from_topcode(topcode_from_graph(g, EXAMPLE1_ORDERS["G"]))
    s_star = assignment_substitute(s_pub, table)
    doc = run.artifact("encrypted", run.seal_layer(plain, s_star))
    t.ciphertext = doc
    t.log("init", "alice", "encrypt with the assignment string", doc)

    whole = topcode_from_graph(g, EXAMPLE1_ORDERS["G"])
    for p, order in zip(privates, (EXAMPLE1_ORDERS["T"], EXAMPLE1_ORDERS["J"])):
        whole = whole.concat(topcode_from_graph(p, order))
    t.log("cons-1", "alice", f"coincided matrix spans q={whole.q}")

    record = authenticate_coincide([g] + list(privates), target)
    run.check_auth("auth", "alice", record, "coincide onto the target graph")

    recovered = run.open_layer("cons-2", "alice", "decrypt with the assignment string", doc, s_star)
    return recovered


def _proto_string_key_only(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    plain = _material_plaintext(material)
    ctx = run.ctx
    s_apub = ctx.key_of("alice-string", "pub")
    t.log("step-1", "alice", f"send public-key string {s_apub}")

    sig_b = ctx.graph_at(ctx.pairs["bob-graph"].signature_index)
    sig_b_key = graph_key_string(sig_b)
    inner = run.seal_layer(plain, s_apub)
    doc = run.artifact("encrypted", run.seal_layer(inner, sig_b_key))
    t.ciphertext = doc
    t.log("step-2", "bob", "encrypt with s_apub then the identity signature", doc)

    run.auth_pair("step-3", "alice", "bob-graph")
    peeled = run.open_layer("step-3", "alice", "peel the identity signature layer", doc, sig_b_key)

    run.auth_pair("step-4", "alice", "alice-string")
    key = ctx.derived_key("alice-string", "pri")
    recovered = run.open_layer("step-4", "alice", "decrypt with the derived public string", peeled, key)
    return recovered


def _proto_graph_key_only(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    plain = _material_plaintext(material)
    ctx = run.ctx
    g_apub_key = ctx.key_of("alice-graph", "pub")
    t.log("gtep-1", "alice", "send public-key graph")

    sig_b_key = graph_key_string(ctx.graph_at(ctx.pairs["bob-graph"].signature_index))
    inner = run.seal_layer(plain, g_apub_key)
    doc = run.artifact("encrypted", run.seal_layer(inner, sig_b_key))
    t.ciphertext = doc
    t.log("gtep-2", "bob", "encrypt with g_apub then the identity signature", doc)

    run.auth_pair("gtep-3", "alice", "bob-graph")
    peeled = run.open_layer("gtep-3", "alice", "peel the identity signature layer", doc, sig_b_key)

    run.auth_pair("gtep-4", "alice", "alice-graph")
    key = ctx.derived_key("alice-graph", "pri")
    recovered = run.open_layer("gtep-4", "alice", "decrypt with the derived public graph", peeled, key)
    return recovered


def _proto_graph_string_key(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    plain = _material_plaintext(material)
    ctx = run.ctx
    s_apub = ctx.key_of("alice-string", "pub")
    g_apub_key = ctx.key_of("alice-graph", "pub")
    t.log("gstep-1", "alice", "send key package: public graph + public string")

    sig_b_key = graph_key_string(ctx.graph_at(ctx.pairs["bob-graph"].signature_index))
    blob = run.seal_layer(plain, s_apub)
    blob = run.seal_layer(blob, g_apub_key)
    doc = run.artifact("encrypted", run.seal_layer(blob, sig_b_key))
    t.ciphertext = doc
    t.log("gstep-2", "bob", "encrypt with s_apub, g_apub, identity signature", doc)

    run.auth_pair("gstep-3", "alice", "bob-graph")
    peeled = run.open_layer("gstep-3", "alice", "peel the identity signature layer", doc, sig_b_key)

    run.auth_pair("gstep-4", "alice", "alice-graph")
    peeled = run.open_layer(
        "gstep-4", "alice", "decrypt the graph layer", peeled, ctx.derived_key("alice-graph", "pri")
    )

    run.auth_pair("gstep-5", "alice", "alice-string")
    recovered = run.open_layer(
        "gstep-5", "alice", "decrypt the string layer", peeled, ctx.derived_key("alice-string", "pri")
    )
    return recovered


def _proto_key_pair_plan_1(run: _Run, material: Mapping) -> bytes:
    """Node-to-node with provisional keys; the provisional pair expires after
    step 4 and any later use is an error."""
    t = run.transcript
    ctx = run.ctx
    rng = random.Random(ctx.seed + 101)
    payload_a = _material_plaintext(material)

    prov_idx = rng.randrange(STRING_GROUP_ORDER)
    provisional = ctx.string_at(prov_idx)
    t.log("send-i-1", "alice", "request provisional keys")
    t.log("send-i-2", "bob", "send provisional public string", str(provisional))

    doc_a = run.artifact("encrypted", run.seal_layer(payload_a, provisional))
    t.ciphertext = doc_a
    t.log("send-i-3", "alice", "encrypt key package with the provisional key", doc_a)

    opened = run.open_layer("send-i-4", "bob", "open with the provisional key", doc_a, provisional)
    t.log("send-i-4", "bob", "provisional keys deleted")
    run.ctx = ctx  # provisional expiry is tracked by the transcript

    s_apub = ctx.key_of("alice-string", "pub")
    doc_b = run.seal_layer(opened, s_apub)
    t.log("send-i-5", "bob", "re-encrypt under alice's public string", doc_b)
    run.auth_pair("send-i-5", "alice", "alice-string")
    recovered = run.open_layer(
        "send-i-5", "alice", "decrypt with the derived public string", doc_b,
        ctx.derived_key("alice-string", "pri"),
    )
    return recovered


def _plan_group_issue(run: _Run, step_prefix: str, zero_s: int, zero_g: int, actors: Sequence[str]) -> None:
    """Shared body of plans II-IV: re-issue signatures under the given zeros
    and authenticate them."""
    ctx = run.ctx
    t = run.transcript
    for actor in actors:
        for kind, zero, order in (("string", zero_s, STRING_GROUP_ORDER), ("graph", zero_g, GRAPH_GROUP_ORDER)):
            name = f"{actor}-{kind}"
            pair = ctx.pairs[name]
            issued = GroupKeyPair.issue(pair.group_id, order, pair.pub_index, pair.pri_index, zero)
            ctx.pairs[name] = issued
            record = issued.authenticate(zero)
            run.check_auth(f"{step_prefix}-{actor}-{kind}", "center", record, f"issue {name}")


def _plan_round_trip(run: _Run, material: Mapping, receiver_pair: str) -> bytes:
    """One sealed message to exercise the issued keys."""
    ctx = run.ctx
    plain = _material_plaintext(material)
    key = ctx.key_of(receiver_pair, "pub")
    doc = run.artifact("encrypted", run.seal_layer(plain, key))
    run.transcript.ciphertext = doc
    run.transcript.log("transfer", "center", f"message sealed under {receiver_pair} pub", doc)
    run.auth_pair("receive", receiver_pair.split("-")[0], receiver_pair)
    return run.open_layer(
        "receive", receiver_pair.split("-")[0], "decrypt with the derived key", doc,
        ctx.derived_key(receiver_pair, "pri"),
    )


def _proto_key_pair_plan_2(run: _Run, material: Mapping) -> bytes:
    # common zeros straight from the context
    _plan_group_issue(run, "send-ii", run.ctx.string_zero, run.ctx.graph_zero, ["alice"])
    return _plan_round_trip(run, material, "alice-string")


def _proto_key_pair_plan_3(run: _Run, material: Mapping) -> bytes:
    # personalized zeros for alice only
    rng = random.Random(run.ctx.seed + 303)
    zero_s = rng.randrange(STRING_GROUP_ORDER)
    zero_g = rng.randrange(GRAPH_GROUP_ORDER)
    run.ctx.string_zero = zero_s
    run.ctx.graph_zero = zero_g
    _plan_group_issue(run, "send-iii", zero_s, zero_g, ["alice"])
    return _plan_round_trip(run, material, "alice-string")


def _proto_key_pair_plan_4(run: _Run, material: Mapping) -> bytes:
    # one zero customized for the pair alice+bob
    rng = random.Random(run.ctx.seed + 404)
    zero_s = rng.randrange(STRING_GROUP_ORDER)
    zero_g = rng.randrange(GRAPH_GROUP_ORDER)
    run.ctx.string_zero = zero_s
    run.ctx.graph_zero = zero_g
    _plan_group_issue(run, "send-iv", zero_s, zero_g, ["alice", "bob"])
    return _plan_round_trip(run, material, "bob-string")


def _proto_tkpdra(run: _Run, material: Mapping) -> bytes:
    """Four nested layers: alice's private string and graph, then bob's
    public string and graph; peeled strictly last-on first-off."""
    t = run.transcript
    ctx = run.ctx
    plain = _material_plaintext(material)

    f1 = run.seal_layer(plain, ctx.key_of("alice-string", "pri"))
    f2 = run.seal_layer(f1, ctx.key_of("alice-graph", "pri"))
    t.log("tkpdra-1", "alice", "encrypt with private string and private graph", f2)

    f3 = run.seal_layer(f2, ctx.key_of("bob-string", "pub"))
    f4 = run.artifact("f4", run.seal_layer(f3, ctx.key_of("bob-graph", "pub")))
    t.ciphertext = f4
    t.log("tkpdra-2", "center", "encrypt with bob's public string and graph", f4)

    t.log("tkpdra-3", "center", "package sent to bob: f4 + alice's public keys", f4)

    run.auth_pair("tkpdra-4", "bob", "bob-graph")
    f3_star = run.open_layer(
        "tkpdra-4", "bob", "peel bob's graph layer", f4, ctx.derived_key("bob-graph", "pri")
    )

    run.auth_pair("tkpdra-5", "bob", "bob-string")
    f2_star = run.open_layer(
        "tkpdra-5", "bob", "peel bob's string layer", f3_star, ctx.derived_key("bob-string", "pri")
    )

    run.auth_pair("tkpdra-6", "bob", "alice-graph")
    f1_star = run.open_layer(
        "tkpdra-6", "bob", "peel alice's graph layer", f2_star, ctx.derived_key("alice-graph", "pub")
    )

    run.auth_pair("tkpdra-7", "bob", "alice-string")
    recovered = run.open_layer(
        "tkpdra-7", "bob", "peel alice's string layer", f1_star, ctx.derived_key("alice-string", "pub")
    )
    return recovered


def _proto_self_cert_1(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    ctx = run.ctx
    plain = _material_plaintext(material)
    t.log("self-1.1", "alice", "send key package A")
    t.log("self-1.2", "bob", "send key package B")

    f1 = run.seal_layer(plain, ctx.key_of("bob-string", "pub"))
    f2 = run.artifact("encrypted", run.seal_layer(f1, ctx.key_of("alice-graph", "pri")))
    t.ciphertext = f2
    t.log("self-1.3", "alice", "encrypt with s_bpub then private graph", f2)

    run.auth_pair("self-1.4", "bob", "alice-graph")
    peeled = run.open_layer(
        "self-1.4", "bob", "peel alice's graph layer", f2, ctx.derived_key("alice-graph", "pub")
    )

    run.auth_pair("self-1.5", "bob", "bob-string")
    recovered = run.open_layer(
        "self-1.5", "bob", "decrypt with private string", peeled, ctx.derived_key("bob-string", "pri")
    )
    return recovered


def _proto_self_cert_2(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    ctx = run.ctx
    rng = random.Random(ctx.seed + 202)
    plain = _material_plaintext(material)

    # bob's two public strings; the first drives the assignment key
    b1 = ctx.string_at(rng.randrange(STRING_GROUP_ORDER))
    b2_pair = ctx.pairs["bob-string"]
    t.log("self-2.1", "alice", "send key package A")
    t.log("self-2.2", "bob", "send key package B with two public strings")

    blob = run.seal_layer(plain, ctx.key_of("bob-string", "pub"))
    blob = run.seal_layer(blob, ctx.key_of("alice-string", "pri"))
    blob = run.seal_layer(blob, ctx.key_of("alice-graph", "pri"))
    t.log("self-2.3", "alice", "three-layer protection", blob)

    s_star = _assignment_from_string(ctx.key_of("alice-string", "pub"), b1)
    f4 = run.artifact("encrypted", run.seal_layer(blob, s_star))
    t.ciphertext = f4
    t.log("self-2.4", "alice", "fourth layer: assignment string", f4)
    t.log("self-2.5", "alice", "send encrypted file and the assignment string", s_star.to_text())

    expected = _assignment_from_string(ctx.key_of("alice-string", "pub"), b1)
    record = AuthRecord(
        AuthKind.STRING_TWIN, (str(ctx.key_of("alice-string", "pub")), str(b1)),
        _digest(str(expected)), expected == s_star,
    )
    run.check_auth("self-2.6", "bob", record, "recompute the assignment string")
    peeled = run.open_layer("self-2.6", "bob", "peel the assignment layer", f4, s_star)

    run.auth_pair("self-2.7", "bob", "alice-graph")
    peeled = run.open_layer(
        "self-2.7", "bob", "peel alice's graph layer", peeled, ctx.derived_key("alice-graph", "pub")
    )
    run.auth_pair("self-2.7b", "bob", "alice-string")
    peeled = run.open_layer(
        "self-2.7b", "bob", "peel alice's string layer", peeled, ctx.derived_key("alice-string", "pub")
    )
    run.auth_pair("self-2.8", "bob", "bob-string")
    recovered = run.open_layer(
        "self-2.8", "bob", "decrypt with the second private string", peeled,
        ctx.derived_key("bob-string", "pri"),
    )
    return recovered


def _graph_sequence_keys(ctx: ProtocolContext, count: int, salt: int) -> list[DigitString]:
    rng = random.Random(ctx.seed + salt)
    return [graph_key_string(ctx.graph_at(rng.randrange(GRAPH_GROUP_ORDER))) for _ in range(count)]


def _proto_self_cert_3(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    ctx = run.ctx
    plain = _material_plaintext(material)
    m = int(material.get("sequence_length", 3))
    keys = _graph_sequence_keys(ctx, m, salt=301)
    t.log("self-3.1", "alice", f"send public graph sequence of rank {m}")
    t.log("self-3.2", "bob", "send key package B")

    blob = run.seal_layer(plain, ctx.key_of("bob-string", "pub"))
    for i, key in enumerate(keys, start=1):
        blob = run.seal_layer(blob, key)
    blob = run.artifact("encrypted", blob)
    t.ciphertext = blob
    t.log("self-3.3", "alice", f"{m + 1}-layer onion", blob)

    for i, key in reversed(list(enumerate(keys, start=1))):
        blob = run.open_layer("self-3.4", "bob", f"peel graph layer {i}", blob, key)
    run.auth_pair("self-3.5", "bob", "bob-string")
    recovered = run.open_layer(
        "self-3.5", "bob", "decrypt with private string", blob, ctx.derived_key("bob-string", "pri")
    )
    return recovered


def _proto_self_cert_4(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    ctx = run.ctx
    plain = _material_plaintext(material)
    m = int(material.get("alice_rank", 2))
    n = int(material.get("bob_rank", 2))
    a_keys = _graph_sequence_keys(ctx, m, salt=401)
    b_keys = _graph_sequence_keys(ctx, n, salt=402)
    t.log("self-4.1", "alice", f"send public graph sequence of rank {m}")
    t.log("self-4.2", "bob", f"send public graph sequence of rank {n}")

    blob = run.seal_layer(plain, ctx.key_of("bob-string", "pub"))
    for key in a_keys:
        blob = run.seal_layer(blob, key)
    for key in b_keys:
        blob = run.seal_layer(blob, key)
    blob = run.artifact("encrypted", blob)
    t.ciphertext = blob
    t.log("self-4.3", "alice", f"{m + n + 1}-layer onion", blob)

    for i, key in reversed(list(enumerate(b_keys, start=1))):
        blob = run.open_layer("self-4.5", "bob", f"peel bob graph layer {i}", blob, key)
    for i, key in reversed(list(enumerate(a_keys, start=1))):
        blob = run.open_layer("self-4.5", "bob", f"peel alice graph layer {i}", blob, key)
    run.auth_pair("self-4.6", "bob", "bob-string")
    recovered = run.open_layer(
        "self-4.6", "bob", "decrypt with private string", blob, ctx.derived_key("bob-string", "pri")
    )
    return recovered


def _proto_self_cert_5(run: _Run, material: Mapping) -> bytes:
    t = run.transcript
    ctx = run.ctx
    plain = _material_plaintext(material)
    nb = int(material.get("bob_string_rank", 2))
    ma = int(material.get("alice_rank", 1))
    mb = int(material.get("bob_rank", 1))
    rng = random.Random(ctx.seed + 501)
    b_strings = [ctx.string_at(rng.randrange(STRING_GROUP_ORDER)) for _ in range(nb)]
    a_keys = _graph_sequence_keys(ctx, ma, salt=502)
    b_keys = _graph_sequence_keys(ctx, mb, salt=503)
    t.log("self-5.1", "alice", "send key package A")
    t.log("self-5.2", "bob", "send key package B")

    blob = plain
    for s in b_strings:
        blob = run.seal_layer(blob, s)
    for key in a_keys:
        blob = run.seal_layer(blob, key)
    for key in b_keys:
        blob = run.seal_layer(blob, key)
    blob = run.artifact("encrypted", blob)
    t.ciphertext = blob
    t.log("self-5.3", "alice", f"{nb + ma + mb}-layer onion", blob)

    for i, key in reversed(list(enumerate(b_keys, start=1))):
        blob = run.open_layer("self-5.5", "bob", f"peel bob graph layer {i}", blob, key)
    for i, key in reversed(list(enumerate(a_keys, start=1))):
        blob = run.open_layer("self-5.5", "bob", f"peel alice graph layer {i}", blob, key)
    for i, s in reversed(list(enumerate(b_strings, start=1))):
        blob = run.open_layer("self-5.6", "bob", f"peel string layer {i}", blob, s)
    return blob


PROTOCOLS: dict[str, Callable[[_Run, Mapping], bytes]] = {
    "top-en-decryption-1": _proto_top_en_1,
    "top-en-decryption-2": _proto_top_en_2,
    "string-key-only": _proto_string_key_only,
    "graph-key-only": _proto_graph_key_only,
    "graph-string-key": _proto_graph_string_key,
    "key-pair-plan-1": _proto_key_pair_plan_1,
    "key-pair-plan-2": _proto_key_pair_plan_2,
    "key-pair-plan-3": _proto_key_pair_plan_3,
    "key-pair-plan-4": _proto_key_pair_plan_4,
    "tkpdra": _proto_tkpdra,
    "self-cert-1": _proto_self_cert_1,
    "self-cert-2": _proto_self_cert_2,
    "self-cert-3": _proto_self_cert_3,
    "self-cert-4": _proto_self_cert_4,
    "self-cert-5": _proto_self_cert_5,
}


def run_protocol(
    protocol_id: str,
    material: Mapping | None = None,
    seed: int = 0,
    tamper: Tamper | None = None,
) -> ProtocolTranscript:
    """Execute one protocol end to end.

    The verdict is true only when every authentication passed and the
    recovered plaintext matches byte for byte; the first failing step
    aborts the run and is named on the transcript."""
    if protocol_id not in PROTOCOLS:
        raise ProtocolError(f"unknown protocol {protocol_id!r}")
    material = dict(material or {})
    transcript = ProtocolTranscript(protocol_id=protocol_id, seed=seed)
    ctx = ProtocolContext.create(seed)
    run = _Run(transcript, ctx, tamper or {})
    try:
        recovered = PROTOCOLS[protocol_id](run, material)
    except _Abort as abort:
        transcript.verdict = False
        transcript.failing_step = abort.step
        transcript.log(abort.step, "-", f"abort: {abort.reason}")
        return transcript
    expected = _material_plaintext(material)
    transcript.verdict = recovered == expected
    if not transcript.verdict:
        transcript.failing_step = "final-compare"
    return transcript


# ---------------------------------------------------------------------------
# The key-pair dispatcher over the four topological sources.
# ---------------------------------------------------------------------------


class KeySource(Enum):
    COMPLETE_SPLIT = "complete-split"
    GROUP = "group"
    PARTITION = "partition"
    BIPARTITE = "bipartite"


@dataclass
class KeyPair:
    """Matched public/private material from one topological source."""

    source: KeySource
    public_graphs: tuple[ColoredGraph, ...] = ()
    private_graphs: tuple[ColoredGraph, ...] = ()
    public_string: DigitString | None = None
    private_string: DigitString | None = None
    provenance: object = None  # source-specific: target graph, group pair, ...


def _color_tree(tree: Graph) -> ColoredGraph:
    vcolors = {v: v for v in tree.vertices}
    ecolors = {(u, v): abs(u - v) for u, v in tree.edges}
    return ColoredGraph(tree, vcolors, ecolors)


def gen_keypair(source: KeySource, params: Mapping, seed: int = 0) -> KeyPair:
    """Generate key material from a topological source.

    * COMPLETE_SPLIT {m}: public = one spanning tree of K_2m, private = the
      remaining m-1 edge-disjoint spanning trees; the target K_2m is the
      coinciding authentication.
    * GROUP {order, zero}: a registered pub/pri index pair with its
      signature element.
    * PARTITION {target, parts, position, public_refinement,
      private_refinement, mode}: twin-sum or twin-product strings.
    * BIPARTITE {m, n, public_edges}: a subgraph of K_{m,n} and its edge
      complement.
    """
    rng = random.Random(seed)
    if source is KeySource.COMPLETE_SPLIT:
        from .graphs import split_complete_even

        m = int(params["m"])
        trees = [_color_tree(t) for t in split_complete_even(m)]
        return KeyPair(
            source,
            public_graphs=(trees[0],),
            private_graphs=tuple(trees[1:]),
            provenance=Graph.complete(2 * m),
        )
    if source is KeySource.GROUP:
        order = int(params["order"])
        zero = int(params.get("zero", 0))
        pub = int(params.get("pub", rng.randrange(order)))
        pri = int(params.get("pri", rng.randrange(order)))
        pair = GroupKeyPair.issue(params.get("group_id", "group"), order, pub, pri, zero)
        return KeyPair(source, provenance=pair)
    if source is KeySource.PARTITION:
        pair = PartitionKeyPair(
            target=int(params["target"]),
            parts=tuple(params["parts"]),
            position=int(params.get("position", 0)),
            public_refinement=tuple(params["public_refinement"]),
            private_refinement=tuple(params["private_refinement"]),
            mode=params.get("mode", "sum"),
        )
        return KeyPair(
            source,
            public_string=pair.public_string(),
            private_string=pair.private_string(),
            provenance=pair,
        )
    if source is KeySource.BIPARTITE:
        pub, pri = bipartite_keypair(int(params["m"]), int(params["n"]), params["public_edges"])
        color = lambda g: ColoredGraph(g, {v: v for v in g.vertices}, None)
        return KeyPair(
            source,
            public_graphs=(color(pub),),
            private_graphs=(color(pri),),
            provenance=Graph.complete_bipartite(int(params["m"]), int(params["n"])),
        )
    raise ProtocolError(f"unknown key source {source}")


def authenticate(pair: KeyPair, context: Mapping | None = None) -> AuthRecord:
    """Check the pair against its source's authentication predicate."""
    context = dict(context or {})
    if pair.source is KeySource.COMPLETE_SPLIT:
        target = context.get("target", pair.provenance)
        return authenticate_coincide(
            list(pair.public_graphs) + list(pair.private_graphs), target
        )
    if pair.source is KeySource.GROUP:
        zero = context["zero"] if "zero" in context else None
        group_pair: GroupKeyPair = pair.provenance
        if zero is None:
            raise ProtocolError("group authentication needs the zero in context")
        return group_pair.authenticate(zero)
    if pair.source is KeySource.PARTITION:
        return pair.provenance.authenticate()
    if pair.source is KeySource.BIPARTITE:
        host: Graph = pair.provenance
        pub = pair.public_graphs[0].graph
        pri = pair.private_graphs[0].graph
        ok = (
            not (pub.edges & pri.edges)
            and (pub.edges | pri.edges) == host.edges
        )
        return AuthRecord(
            AuthKind.GRAPH_COINCIDE,
            (_digest(json.dumps(pub.to_json())), _digest(json.dumps(pri.to_json()))),
            _digest(json.dumps(host.to_json())),
            ok,
        )
    raise ProtocolError(f"unknown key source {pair.source}")
