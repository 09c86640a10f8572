"""Scenario files: JSON descriptions of germ systems, sections and points.

A scenario is UTF-8 JSON with the keys

  name     string
  space    {"finite": n} or {"cantor": "<alphabet>"}
  regime   "A" | "B" | "C"
  labels / maps / mult / star / witness   (regime C)
  table / action  or  generators / cap    (regime A)
  generators                              (regime B)
  sections  {name: "c * (label, support) + ..."}   optional
  points    {name: "u(v)" | index}                 optional

Map specifications are "id", {"id_on": "<regex>"}, a list of [src, dst]
rewrite rules (Cantor), or an object {"0": 1, ...} of point images
(finite).  Open-set supports are anchored regular expressions over the
alphabet (operators: concatenation, |, *, parentheses, ε, ∅) on Cantor
backends and "{i,j,...}" / "all" on finite ones.  Unknown keys are
rejected.  Canonical serialization fixes the key order and normalises map
specifications; a loaded scenario round-trips byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .germs import GermSystem
from .maps import PartialMap
from .scalars import Scalar
from .sections import Section
from .semigroups import CapExceeded, generate_closure, validate
from .topology import OpenSet, Space, UPPoint

__all__ = ["Scenario", "ScenarioError", "load", "loads", "parse_section"]


class ScenarioError(ValueError):
    """A malformed scenario, with the offending field named."""

    def __init__(self, where: str, detail: str):
        self.where = where
        super().__init__(f"{where}: {detail}")


_TOP_KEYS = {
    "name",
    "space",
    "regime",
    "labels",
    "maps",
    "mult",
    "star",
    "witness",
    "table",
    "action",
    "generators",
    "cap",
    "sections",
    "points",
}


@dataclass
class Scenario:
    name: str
    space: Space
    regime: str
    system: GermSystem
    sections: dict[str, Section] = field(default_factory=dict)
    points: dict[str, UPPoint] = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def canonical_dict(self) -> dict:
        out: dict = {"name": self.name}
        if self.space.is_finite:
            out["space"] = {"finite": self.space.size}
        else:
            out["space"] = {"cantor": "".join(self.space.alphabet)}
        out["regime"] = self.regime
        for key in ("labels", "maps", "mult", "star", "witness", "table", "action", "generators", "cap"):
            if key in self.raw:
                out[key] = self.raw[key]
        if "sections" in self.raw:
            out["sections"] = self.raw["sections"]
        if "points" in self.raw:
            out["points"] = self.raw["points"]
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), ensure_ascii=False, indent=2) + "\n"


def _parse_space(obj, where="space") -> Space:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ScenarioError(where, "expected {'finite': n} or {'cantor': alphabet}")
    if "finite" in obj:
        n = obj["finite"]
        if not isinstance(n, int) or n < 1:
            raise ScenarioError(where, "finite size must be a positive integer")
        return Space.finite(n)
    if "cantor" in obj:
        return Space.cantor(str(obj["cantor"]))
    raise ScenarioError(where, "expected {'finite': n} or {'cantor': alphabet}")


def _parse_map(space: Space, spec, where: str) -> PartialMap:
    if spec == "id":
        return PartialMap.identity(space)
    if isinstance(spec, dict) and set(spec) == {"id_on"}:
        return PartialMap.identity_on(_parse_open(space, spec["id_on"], where))
    if space.is_finite:
        if not isinstance(spec, dict):
            raise ScenarioError(where, "finite maps are objects of point images")
        try:
            return PartialMap.of_pairs(space, {int(k): int(v) for k, v in spec.items()})
        except (TypeError, ValueError) as e:
            raise ScenarioError(where, str(e))
    if not isinstance(spec, list):
        raise ScenarioError(where, "Cantor maps are lists of [src, dst] rules")
    try:
        return PartialMap.prefix_exchange(space, [(str(a), str(b)) for a, b in spec])
    except (TypeError, ValueError) as e:
        raise ScenarioError(where, str(e))


def _canonical_map_spec(m: PartialMap):
    if m.space.is_finite:
        return {str(i): j for i, j in m.pairs}
    if m.is_identity():
        return "id"
    return [[a, b] for a, b in m.rules]


def _parse_open(space: Space, spec, where: str) -> OpenSet:
    if space.is_finite:
        text = str(spec).strip()
        if text == "all":
            return OpenSet.full(space)
        if text.startswith("{") and text.endswith("}"):
            body = text[1:-1].strip()
            pts = [int(p) for p in body.split(",") if p.strip() != ""] if body else []
            try:
                return OpenSet.of_points(space, pts)
            except ValueError as e:
                raise ScenarioError(where, str(e))
        raise ScenarioError(where, f"finite supports are '{{i,j}}' or 'all', got {text!r}")
    try:
        return OpenSet.from_regex(space, str(spec))
    except ValueError as e:
        raise ScenarioError(where, str(e))


def _pair_key(key: str, where: str) -> tuple[str, str]:
    parts = key.split()
    if len(parts) != 2:
        raise ScenarioError(where, f"pair keys are 'a b', got {key!r}")
    return parts[0], parts[1]


def parse_section(scn_space: Space, gs: GermSystem, text: str, where: str = "section") -> Section:
    """Parse "c * (label, support)" terms joined by "+"."""
    terms = []
    s = text
    pos = 0
    first = True
    while True:
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos >= len(s):
            break
        if not first:
            if s[pos] != "+":
                raise ScenarioError(where, f"expected '+' between terms near {s[pos:pos+12]!r}")
            pos += 1
        first = False
        iparen = s.find("(", pos)
        if iparen < 0:
            raise ScenarioError(where, "term is missing its '(label, support)' part")
        head = s[pos:iparen].strip()
        if not head.endswith("*"):
            raise ScenarioError(where, f"term head {head!r} must end with '*'")
        try:
            coeff = Scalar.parse(head[:-1].strip())
        except ValueError as e:
            raise ScenarioError(where, str(e))
        depth = 0
        jclose = -1
        for i in range(iparen, len(s)):
            if s[i] == "(":
                depth += 1
            elif s[i] == ")":
                depth -= 1
                if depth == 0:
                    jclose = i
                    break
        if jclose < 0:
            raise ScenarioError(where, "unbalanced parentheses in a term")
        inside = s[iparen + 1 : jclose]
        if "," not in inside:
            raise ScenarioError(where, "term needs '(label, support)'")
        label_txt, support_txt = inside.split(",", 1)
        label = _resolve_label(gs, label_txt.strip(), where)
        support = _parse_open(scn_space, support_txt.strip(), where)
        terms.append((label, support, coeff))
        pos = jclose + 1
    return Section.of_terms(gs, terms)


def _resolve_label(gs: GermSystem, name: str, where: str):
    if gs.regime in ("A", "C"):
        if name in (gs.labels()):
            return name
        raise ScenarioError(where, f"unknown label {name!r}")
    # regime B: a word in the generators, "*" suffix inverts
    m = PartialMap.identity(gs.space)
    if name != "1":
        for word in name.split():
            inv = word.endswith("*")
            base = word[:-1] if inv else word
            if base not in gs.generators:
                raise ScenarioError(where, f"unknown generator {base!r}")
            g = gs.generators[base]
            m = m.compose(g.inverse() if inv else g)
    label = m
    gs.mul(gs.unit_label, label)  # register a display name
    return label


def loads(text: str) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("json", str(e))
    if not isinstance(obj, dict):
        raise ScenarioError("json", "top level must be an object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ScenarioError("keys", f"unknown keys {sorted(unknown)}")
    for key in ("name", "space", "regime"):
        if key not in obj:
            raise ScenarioError(key, "missing")
    name = str(obj["name"])
    space = _parse_space(obj["space"])
    regime = obj["regime"]
    if regime not in ("A", "B", "C"):
        raise ScenarioError("regime", f"must be A, B or C, got {regime!r}")

    raw: dict = {}
    if regime == "C":
        for key in ("labels", "maps", "star"):
            if key not in obj:
                raise ScenarioError(key, "required in regime C")
        labels = [str(x) for x in obj["labels"]]
        maps = {
            lab: _parse_map(space, spec, f"maps.{lab}") for lab, spec in obj["maps"].items()
        }
        missing = [lab for lab in labels if lab not in maps]
        if missing:
            raise ScenarioError("maps", f"missing maps for {missing}")
        mult = {}
        for key, val in (obj.get("mult") or {}).items():
            mult[_pair_key(key, "mult")] = str(val)
        star = {str(k): str(v) for k, v in obj["star"].items()}
        witness = {}
        witness_src = {}
        for key, val in (obj.get("witness") or {}).items():
            pair = _pair_key(key, "witness")
            witness[pair] = _parse_open(space, val, f"witness.{key}")
            witness_src[pair] = str(val)
        gs = GermSystem.explicit(space, labels, maps, mult, star, witness, name=name)
        raw.update(
            labels=labels,
            maps={lab: _canonical_map_spec(maps[lab]) for lab in labels},
            mult={f"{a} {b}": v for (a, b), v in sorted(mult.items())},
            star={k: star[k] for k in sorted(star)},
        )
        if witness_src:
            raw["witness"] = {f"{a} {b}": witness_src[(a, b)] for (a, b) in sorted(witness_src)}
    elif regime == "B":
        if "generators" not in obj:
            raise ScenarioError("generators", "required in regime B")
        gens = {
            str(gname): _parse_map(space, spec, f"generators.{gname}")
            for gname, spec in obj["generators"].items()
        }
        gs = GermSystem.from_generators(space, gens, name=name)
        raw.update(generators={g: _canonical_map_spec(m) for g, m in gens.items()})
    else:  # regime A
        if "table" in obj:
            table = obj["table"]
            for key in ("elements", "unit", "products"):
                if key not in table:
                    raise ScenarioError("table", f"missing {key!r}")
            elements = [str(x) for x in table["elements"]]
            index = {e: i for i, e in enumerate(elements)}
            if table["unit"] not in index:
                raise ScenarioError("table.unit", "unit must be an element")
            mult_rows = [[None] * len(elements) for _ in elements]
            for key, val in table["products"].items():
                a, b = _pair_key(key, "table.products")
                if a not in index or b not in index or str(val) not in index:
                    raise ScenarioError("table.products", f"unknown element in {key!r}")
                mult_rows[index[a]][index[b]] = index[str(val)]
            for i, row in enumerate(mult_rows):
                for j, v in enumerate(row):
                    if v is None:
                        raise ScenarioError(
                            "table.products", f"missing product {elements[i]} {elements[j]}"
                        )
            try:
                sg = validate(elements, index[table["unit"]], mult_rows)
            except Exception as e:
                raise ScenarioError("table", str(e))
            if "action" not in obj:
                raise ScenarioError("action", "regime A tables need an action")
            action = {
                index[str(lab)]: _parse_map(space, spec, f"action.{lab}")
                for lab, spec in obj["action"].items()
            }
            if set(action) != set(range(len(elements))):
                raise ScenarioError("action", "action must cover every element")
            gs = GermSystem.from_semigroup_action(sg, action, name=name)
            raw.update(
                table={
                    "elements": elements,
                    "unit": table["unit"],
                    "products": {k: str(v) for k, v in sorted(table["products"].items())},
                },
                action={lab: _canonical_map_spec(action[index[lab]]) for lab in elements},
            )
        elif "generators" in obj:
            gens = {
                str(gname): _parse_map(space, spec, f"generators.{gname}")
                for gname, spec in obj["generators"].items()
            }
            cap = obj.get("cap", 256)
            if not isinstance(cap, int) or cap < 1:
                raise ScenarioError("cap", "cap must be a positive integer")
            try:
                sg, action = generate_closure(list(gens.values()), cap, names=list(gens))
            except CapExceeded:
                raise
            except Exception as e:
                raise ScenarioError("generators", str(e))
            gs = GermSystem.from_semigroup_action(sg, action, name=name)
            raw.update(
                generators={g: _canonical_map_spec(m) for g, m in gens.items()}, cap=cap
            )
        else:
            raise ScenarioError("regime", "regime A needs a table+action or generators")

    scn = Scenario(name=name, space=space, regime=regime, system=gs, raw=raw)
    for pname, ptext in (obj.get("points") or {}).items():
        try:
            scn.points[str(pname)] = UPPoint.parse(space, str(ptext))
        except ValueError as e:
            raise ScenarioError(f"points.{pname}", str(e))
    for sname, stext in (obj.get("sections") or {}).items():
        scn.sections[str(sname)] = parse_section(space, gs, str(stext), f"sections.{sname}")
    if obj.get("points"):
        scn.raw["points"] = {str(k): str(v) for k, v in obj["points"].items()}
    if obj.get("sections"):
        scn.raw["sections"] = {str(k): str(v) for k, v in obj["sections"].items()}
    return scn


def load(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
