"""Structure files, generator shorthands and run reports."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

from .structures import Schema, Structure, gen_linear_order, gen_rooted_tree

STRUCTURE_HEADER = "msgw-structure v1"
REPORT_HEADER = "msgw-report v1"
ENGINE_VERSION = "msgames 0.1.0"

_REL_LINE = re.compile(r"^relation\s+(\S+?)/(\d+)\s*:(.*)$")
_CONST_LINE = re.compile(r"^constant\s+(\S+)\s*:\s*(\S+)\s*$")
_TUPLE = re.compile(r"\(([^()]*)\)")


class StructureFormatError(ValueError):
    pass


def parse_shorthand(spec: str) -> Structure | None:
    """LO:n or RT:[parents]; returns None if spec is not a shorthand."""
    spec = spec.strip()
    if spec.startswith("LO:"):
        try:
            n = int(spec[3:])
        except ValueError:
            raise StructureFormatError(f"bad linear order size in {spec!r}") from None
        if n < 1:
            raise StructureFormatError("linear order needs at least one element")
        return gen_linear_order(n)
    if spec.startswith("RT:"):
        body = spec[3:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise StructureFormatError(f"bad parent list in {spec!r}")
        parents = []
        for tok in body[1:-1].split(","):
            tok = tok.strip()
            if tok in ("-", "", "None"):
                parents.append(None)
            else:
                try:
                    parents.append(int(tok))
                except ValueError:
                    raise StructureFormatError(f"bad parent {tok!r}") from None
        try:
            return gen_rooted_tree(parents, name=spec)
        except ValueError as e:
            raise StructureFormatError(str(e)) from None
    return None


def parse_structure(text: str) -> Structure:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or lines[0] != STRUCTURE_HEADER:
        raise StructureFormatError(f"missing header {STRUCTURE_HEADER!r}")
    name, size, labels = "", None, None
    rels: dict[str, tuple[int, list]] = {}
    consts: dict[str, str] = {}
    for line in lines[1:]:
        m = _REL_LINE.match(line)
        if m:
            rname, arity = m.group(1), int(m.group(2))
            if rname in rels:
                raise StructureFormatError(f"relation {rname} declared twice")
            tuples = [[x.strip() for x in t.split(",")] for t in _TUPLE.findall(m.group(3))]
            rels[rname] = (arity, tuples)
            continue
        m = _CONST_LINE.match(line)
        if m:
            consts[m.group(1)] = m.group(2)
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise StructureFormatError(f"cannot parse line {line!r}")
        key, value = key.strip(), value.strip()
        if key == "name":
            name = value
        elif key == "size":
            try:
                size = int(value)
            except ValueError:
                raise StructureFormatError(f"bad size {value!r}") from None
        elif key == "elements":
            labels = value.split()
        else:
            raise StructureFormatError(f"unknown key {key!r}")
    if size is None:
        raise StructureFormatError("missing size")
    if labels is not None and len(labels) != size:
        raise StructureFormatError("element label count does not match size")
    index = {lab: i for i, lab in enumerate(labels or [])}

    def elem(tok):
        if tok in index:
            return index[tok]
        try:
            return int(tok)
        except ValueError:
            raise StructureFormatError(f"unknown element {tok!r}") from None

    try:
        schema = Schema(relations=tuple((n, a) for n, (a, _) in rels.items()), constants=tuple(consts))
        return Structure.build(
            schema, size,
            {n: [tuple(elem(x) for x in t) for t in ts] for n, (_, ts) in rels.items()},
            {c: elem(v) for c, v in consts.items()},
            name=name,
        )
    except ValueError as e:
        raise StructureFormatError(str(e)) from None


def format_structure(s: Structure, labels=None) -> str:
    out = [STRUCTURE_HEADER]
    if s.name:
        out.append(f"name: {s.name}")
    out.append(f"size: {s.size}")
    if labels:
        out.append("elements: " + " ".join(labels))
    for (rname, arity), tuples in zip(s.schema.relations, s.relations):
        body = " ".join("(" + ",".join(str(x) for x in t) + ")" for t in sorted(tuples))
        out.append(f"relation {rname}/{arity}: {body}".rstrip())
    for c, v in zip(s.schema.constants, s.constants):
        out.append(f"constant {c}: {v}")
    return "\n".join(out) + "\n"


def load_structure(spec: str) -> Structure:
    """A shorthand or a path to a structure file."""
    s = parse_shorthand(spec)
    if s is not None:
        return s
    path = Path(spec)
    if not path.is_file():
        raise StructureFormatError(f"no such structure file or shorthand: {spec!r}")
    s = parse_structure(path.read_text())
    return s if s.name else Structure(s.schema, s.size, s.relations, s.constants, path.stem)


def structure_digest(s: Structure) -> str:
    text = format_structure(Structure(s.schema, s.size, s.relations, s.constants))
    return hashlib.sha256(text.encode()).hexdigest()


REPORT_FIELDS = ("command", "left", "right", "winner", "certificate", "measure", "nodes",
                 "wall_time", "engine")


@dataclass
class RunReport:
    command: str
    left: list = field(default_factory=list)    # sha256 digests
    right: list = field(default_factory=list)
    winner: str = ""
    certificate: str = ""
    measure: str = ""
    nodes: int = 0
    wall_time: float = 0.0
    engine: str = ENGINE_VERSION

    def to_text(self) -> str:
        out = [REPORT_HEADER]
        for key in REPORT_FIELDS:
            val = getattr(self, key)
            if isinstance(val, list):
                val = " ".join(val)
            elif isinstance(val, float):
                val = f"{val:.3f}"
            out.append(f"{key}: {val}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunReport":
        lines = text.splitlines()
        if not lines or lines[0] != REPORT_HEADER:
            raise ValueError(f"missing header {REPORT_HEADER!r}")
        vals = {}
        for line in lines[1:]:
            key, _, val = line.partition(": ")
            vals[key] = val.strip() if key != "command" else val
        return cls(
            command=vals.get("command", ""),
            left=vals.get("left", "").split(),
            right=vals.get("right", "").split(),
            winner=vals.get("winner", ""),
            certificate=vals.get("certificate", ""),
            measure=vals.get("measure", ""),
            nodes=int(vals.get("nodes", 0) or 0),
            wall_time=float(vals.get("wall_time", 0) or 0),
            engine=vals.get("engine", ENGINE_VERSION),
        )
