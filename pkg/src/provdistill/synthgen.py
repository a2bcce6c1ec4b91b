"""Desk-scale synthetic audit logs with injected attack chains.

Benign activity comes from a handful of process roles (web server, shell,
backup job, ...). Each role emits short actions such as open/read/close on a
file or accept/recv/send on a network flow, so entities of the same type share
edge-type statistics. Attack chains appear only after ``attack_start`` and each
chain step creates one entity whose incident edge types follow the profile of
a *different* entity type, which is what a type classifier trips over.

Entity lines carry an extra ``ts`` field (first-use time, ignored by the
parser) so that :func:`split` can partition the stream by time.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundaryOutOfRange, InvalidConfig

PROCESS = "SUBJECT_PROCESS"
FILE = "FILE_OBJECT_FILE"
NETFLOW = "NetFlowObject"
UNIX_SOCKET = "FILE_OBJECT_UNIX_SOCKET"
PIPE = "UnnamedPipeObject"
DIR = "FILE_OBJECT_DIR"

DEFAULT_CLASS_MIX = {FILE: 0.86, UNIX_SOCKET: 0.06, PIPE: 0.07975, DIR: 0.00025}

# action -> (object kind, operation sequence)
ACTIONS = {
    "read_file": (FILE, ("EVENT_OPEN", "EVENT_READ", "EVENT_CLOSE")),
    "write_file": (FILE, ("EVENT_OPEN", "EVENT_WRITE", "EVENT_CLOSE")),
    "exec_file": ("BINARY", ("EVENT_OPEN", "EVENT_EXECUTE", "EVENT_CLOSE")),
    "mmap_file": (FILE, ("EVENT_MMAP",)),
    "accept_net": (NETFLOW, ("EVENT_ACCEPT", "EVENT_RECVFROM", "EVENT_SENDTO")),
    "connect_net": (NETFLOW, ("EVENT_CONNECT", "EVENT_SENDTO", "EVENT_RECVFROM")),
    "unix_ipc": (UNIX_SOCKET, ("EVENT_CONNECT", "EVENT_SENDMSG", "EVENT_RECVMSG")),
    "pipe_io": (PIPE, ("EVENT_CREATE_OBJECT", "EVENT_WRITE", "EVENT_READ")),
    "fork": (PROCESS, ("EVENT_FORK",)),
    "signal": (PROCESS, ("EVENT_SIGNAL",)),
    "list_dir": (DIR, ("EVENT_OPEN", "EVENT_READ", "EVENT_CLOSE")),
}

ROLES = {
    "nginx": {"read_file": 5, "accept_net": 4, "write_file": 1, "signal": 12},
    "sshd": {"accept_net": 3, "fork": 1, "unix_ipc": 1, "signal": 12},
    "bash": {"fork": 2, "exec_file": 3, "read_file": 2, "pipe_io": 2, "signal": 12},
    "backup": {"read_file": 4, "write_file": 2, "list_dir": 1, "connect_net": 1, "signal": 12},
    "dbus-daemon": {"unix_ipc": 3, "read_file": 1, "signal": 12},
    "firefox": {"connect_net": 5, "read_file": 2, "write_file": 2, "mmap_file": 1, "signal": 12},
    "cron": {"fork": 2, "exec_file": 2, "pipe_io": 2, "list_dir": 1, "signal": 12},
}

# attack entity type -> action templates borrowed from another type's profile
MIMIC_ACTIONS = {
    PROCESS: (ACTIONS["pipe_io"][1],),  # behaves like a pipe
    FILE: (("EVENT_SIGNAL",), ("EVENT_FORK",), ACTIONS["exec_file"][1], ACTIONS["connect_net"][1]),  # like a process
    NETFLOW: (ACTIONS["read_file"][1], ACTIONS["write_file"][1]),  # like a file
}
CHAIN_TYPES = (PROCESS, FILE, NETFLOW)


@dataclass(frozen=True)
class SynthConfig:
    """Sizes of the synthetic host.

    ``class_mix`` splits ``n_files`` across file-system object kinds
    (regular files, unix sockets, pipes, directories).
    """

    n_processes: int = 500
    n_files: int = 4000
    n_sockets: int = 500
    benign_events: int = 50_000
    class_mix: dict = field(default_factory=lambda: dict(DEFAULT_CLASS_MIX))
    attack_chains: int = 4
    chain_length: int = 3
    seed: int = 0
    duration_ns: int = 10**12
    attack_start: float = 0.8
    events_per_attack_entity: int = 48

    def validate(self) -> None:
        counts = (self.n_processes, self.n_files, self.n_sockets, self.benign_events,
                  self.attack_chains, self.chain_length, self.events_per_attack_entity)
        if any(int(c) != c or c < 0 for c in counts):
            raise InvalidConfig("all counts must be non-negative integers")
        if any(v < 0 for v in self.class_mix.values()) or abs(sum(self.class_mix.values()) - 1.0) > 1e-9:
            raise InvalidConfig("class_mix proportions must be non-negative and sum to 1")
        unknown = set(self.class_mix) - {FILE, UNIX_SOCKET, PIPE, DIR}
        if unknown:
            raise InvalidConfig(f"unknown class_mix kinds {sorted(unknown)}")
        if not 0 < self.attack_start < 1:
            raise InvalidConfig("attack_start must lie in (0, 1)")
        if self.duration_ns <= 0:
            raise InvalidConfig("duration_ns must be positive")
        if self.benign_events and self.n_processes == 0:
            raise InvalidConfig("benign events need at least one process")
        if self.attack_chains and self.n_processes == 0:
            raise InvalidConfig("attack chains need at least one benign process to start from")


@dataclass
class GroundTruth:
    malicious: set[str] = field(default_factory=set)
    chains: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"malicious": sorted(self.malicious), "chains": self.chains}

    @classmethod
    def from_json(cls, obj: dict) -> "GroundTruth":
        return cls(set(obj["malicious"]), list(obj["chains"]))


def _split_counts(total: int, mix: dict) -> dict:
    kinds = sorted(mix)
    raw = {k: int(np.floor(total * mix[k])) for k in kinds}
    left = total - sum(raw.values())
    for k in sorted(kinds, key=lambda k: (-(total * mix[k] - raw[k]), k))[:left]:
        raw[k] += 1
    return raw


def _process_attrs(role: str, variant: int) -> list:
    return [["name", role], ["cmdline", f"{role} --mode={variant}"]]


class _Host:
    def __init__(self, config: SynthConfig, rng: np.random.Generator):
        self.rng = rng
        self.entities: dict[str, tuple[str, list]] = {}
        self.by_kind: dict[str, list[str]] = {}
        role_names = sorted(ROLES)
        for i in range(config.n_processes):
            role = role_names[i % len(role_names)]
            variant = int(rng.integers(0, 3))
            self._add(f"proc{i:06d}", PROCESS, _process_attrs(role, variant))
        split_counts = _split_counts(config.n_files, config.class_mix)
        n_bin = max(1, split_counts.get(FILE, 0) // 20)
        for kind, n in split_counts.items():
            for i in range(n):
                nid = f"{kind.lower()}{i:06d}"
                # attribute values are coarse (directory, subnet) so that entities
                # first seen after training still have in-vocabulary tokens
                if kind == FILE:
                    attrs = [["path", "/usr/bin" if i < n_bin else f"/home/u{i % 40}"]]
                elif kind == UNIX_SOCKET:
                    attrs = [["path", f"/run/sock{i % 8}"]]
                elif kind == DIR:
                    attrs = [["path", f"/srv/share{i % 4}"]]
                else:
                    attrs = []
                self._add(nid, kind, attrs)
        for i in range(config.n_sockets):
            self._add(f"flow{i:06d}", NETFLOW, [["remote", f"10.0.{i % 16}.0/24:{443 if i % 3 else 80}"]])
        files = self.by_kind.get(FILE, [])
        self.by_kind["BINARY"] = files[:n_bin]
        # Zipf-like popularity; every object is also forced to appear once
        self.cum = {}
        for kind, ids in self.by_kind.items():
            w = np.cumsum(1.0 / np.arange(1, len(ids) + 1) ** 0.8)
            self.cum[kind] = w / w[-1]

    def _add(self, nid, kind, attrs, pooled=True):
        self.entities[nid] = (kind, attrs)
        if pooled:
            self.by_kind.setdefault(kind, []).append(nid)

    def pick(self, kind: str) -> str:
        ids = self.by_kind[kind]
        j = int(np.searchsorted(self.cum[kind], self.rng.random(), side="right"))
        return ids[min(j, len(ids) - 1)]


def _role_of(host: _Host, nid: str) -> str:
    return host.entities[nid][1][0][1]


def generate(config: SynthConfig) -> tuple[list[str], GroundTruth]:
    """Emit JSON-Lines log lines sorted by time plus the malicious-node ground truth."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    host = _Host(config, rng)
    procs = host.by_kind.get(PROCESS, [])
    attack_t0 = int(config.duration_ns * config.attack_start)
    events: list[tuple[int, str, str, str]] = []  # (t, op, subject, object)

    def action_events(proc: str, action: str, t: int, obj: str | None = None):
        kind, ops = ACTIONS[action]
        if obj is None:
            if not host.by_kind.get(kind):
                return
            obj = host.pick(kind)
            if obj == proc:
                return
        for k, op in enumerate(ops):
            events.append((t + k, op, proc, obj))

    role_actions = {}
    for role, acts in ROLES.items():
        names = sorted(acts)
        w = np.array([acts[a] for a in names], dtype=float)
        role_actions[role] = (names, w / w.sum())

    # one guaranteed touch per object so that every declared entity is used
    budget = config.benign_events
    kind_action = {FILE: "read_file", UNIX_SOCKET: "unix_ipc", PIPE: "pipe_io", DIR: "list_dir",
                   NETFLOW: "connect_net"}
    if procs:
        for kind, action in kind_action.items():
            for obj in host.by_kind.get(kind, []):
                if len(events) >= budget:
                    break
                proc = procs[int(rng.integers(len(procs)))]
                action_events(proc, action, int(rng.integers(0, attack_t0)), obj)
        while len(events) < budget:
            proc = procs[int(rng.integers(len(procs)))]
            names, w = role_actions[_role_of(host, proc)]
            action = names[int(rng.choice(len(names), p=w))]
            action_events(proc, action, int(rng.integers(0, config.duration_ns - 8)))
        del events[budget:]

    truth = GroundTruth()
    for c in range(config.attack_chains):
        t = start = int(rng.integers(attack_t0, config.duration_ns - 10**9))
        parent = procs[int(rng.integers(len(procs)))]
        steps = []
        prev = parent
        for k in range(config.chain_length):
            etype = CHAIN_TYPES[(c + k) % len(CHAIN_TYPES)]
            nid = f"atk{c:02d}_{k:02d}"
            # attack entities borrow benign-looking attributes; only their edges differ
            if etype == PROCESS:
                role = sorted(ROLES)[int(rng.integers(len(ROLES)))]
                attrs = _process_attrs(role, 0)
            elif etype == FILE:
                attrs = [["path", f"/home/u{int(rng.integers(40))}"]]
            else:
                attrs = [["remote", f"10.0.{int(rng.integers(16))}.0/24:443"]]
            host._add(nid, etype, attrs, pooled=False)
            truth.malicious.add(nid)
            steps.append({"entity_id": nid, "entity_type": etype})
            # link to the previous step, then a burst of borrowed-profile actions
            templates = MIMIC_ACTIONS[etype]
            events.append((t, templates[0][0], prev, nid))
            t += 1
            n_ev = 0
            while n_ev < config.events_per_attack_entity:
                ops = templates[int(rng.integers(len(templates)))]
                if etype == PROCESS and host.by_kind.get(PIPE):
                    u, v = nid, host.pick(PIPE)
                else:
                    u, v = procs[int(rng.integers(len(procs)))], nid
                for op in ops:
                    events.append((t, op, u, v))
                    t += 1
                n_ev += len(ops)
                t += int(rng.integers(1, 10**6))
            prev = nid
        truth.chains.append({"chain": c, "start_ts": start, "end_ts": t, "steps": steps})

    order = sorted(range(len(events)), key=lambda i: (events[i][0], i))
    lines: list[str] = []
    declared: set[str] = set()
    for n, i in enumerate(order):
        t, op, u, v = events[i]
        for nid in (u, v):
            if nid not in declared:
                declared.add(nid)
                kind, attrs = host.entities[nid]
                lines.append(json.dumps({"record_type": "entity", "entity_id": nid, "entity_type": kind,
                                         "attrs": attrs, "ts": t}, separators=(",", ":")))
        lines.append(json.dumps({"record_type": "event", "event_id": f"e{n:09d}", "subject": u, "object": v,
                                 "ts": t, "op": op}, separators=(",", ":")))
    truth.malicious &= declared
    return lines, truth


def _line_ts(lines: Sequence[str]) -> list[int]:
    """Effective time per line; entity lines without ``ts`` take the next event's time."""
    out: list[int | None] = []
    for line in lines:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            out.append(None)
            continue
        ts = obj.get("ts") if isinstance(obj, dict) else None
        out.append(ts if isinstance(ts, int) and not isinstance(ts, bool) else None)
    nxt = None
    for i in range(len(out) - 1, -1, -1):
        if out[i] is None:
            out[i] = nxt
        else:
            nxt = out[i]
    last = None
    for i in range(len(out)):
        if out[i] is None:
            out[i] = last
        else:
            last = out[i]
    return [0 if t is None else t for t in out]


def split(lines: Sequence[str], boundary_ts: int) -> tuple[list[str], list[str]]:
    """Partition lines into ``ts <= boundary_ts`` (train) and ``ts > boundary_ts`` (eval)."""
    ts = _line_ts(lines)
    if not ts or boundary_ts < min(ts) or boundary_ts > max(ts):
        raise BoundaryOutOfRange(f"boundary {boundary_ts} outside [{min(ts, default=0)}, {max(ts, default=0)}]")
    train = [line for line, t in zip(lines, ts) if t <= boundary_ts]
    evals = [line for line, t in zip(lines, ts) if t > boundary_ts]
    return train, evals


def config_from_dict(obj: dict) -> SynthConfig:
    known = {f for f in SynthConfig.__dataclass_fields__}
    unknown = set(obj) - known
    if unknown:
        raise InvalidConfig(f"unknown synth keys {sorted(unknown)}")
    return SynthConfig(**obj)


def config_to_dict(config: SynthConfig) -> dict:
    return asdict(config)


def read_lines(path) -> Iterable[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]
