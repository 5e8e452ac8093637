"""Scenario files: one YAML document describing a group, cocycle, subgroups and symbols.

Example::

    name: z2_4
    mode: orthogonal            # or: amicable
    group: {kind: elementary_abelian, n: 4}
    cocycle:
      kind: bilinear_form
      form: [[0,1,0,0], [0,0,1,0], [0,0,0,1], [1,0,0,0]]
    subgroups:
      H:
        generators: [[1,1,1,1], [0,1,1,1]]
        character: {table: [[[0,0,0,0], 1], [[1,1,1,1], -1], ...]}
      H_prime: ...
      K: {generators: [[0,0,0,1]], character: trivial}
    symbols: {A: [a, b], B: [c, d]}

Group kinds: ``elementary_abelian`` (n), ``dihedral`` (n), ``wreath`` (n) and
``generators`` (``degree`` plus a list of ``{perm, signs}`` or plain
one-line permutations).

Element references: an integer id; a bit list (a pure sign flip);
``{affine: [a, b]}``; ``{rotation: k, flips: [...]}``; ``{perm, signs}``.

Subgroups give ``generators`` or, for flip groups, a ``profile`` in
{0,±1}^n: the flips e_k with profile[k] != 0, and χ(e_k) = profile[k].

Characters: ``trivial``, ``solve`` (canonical trivialization),
``{generators: [values...]}`` (one ±1 per listed generator, extended by
χ(h s) = ω(h, s) χ(h) χ(s)) or ``{table: [[element, value], ...]}``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .cocycles import (
    CocycleError,
    character_from_generator_values,
    character_from_values,
    cocycle_from_bilinear_form,
    cocycle_from_table,
    solve_trivialization,
    trivial_character,
    trivial_cocycle,
)
from .constructions import AmicableScenario, FopScenario
from .groups import (
    FiniteGroup,
    GroupError,
    SignedPermutation,
    affine_element,
    dihedral_affine,
    element_from_vector,
    elementary_abelian,
    group_from_generators,
    subgroup_generated,
    wreath_element,
    wreath_z2_zn,
)

MODES = ("orthogonal", "amicable")
ROLES = {"orthogonal": ("H", "H_prime", "K"), "amicable": ("H", "H_prime")}
TOP_KEYS = {"name", "mode", "group", "cocycle", "subgroups", "symbols"}


class ScenarioError(ValueError):
    """Malformed scenario; the message starts with the offending field path or line."""

    def __init__(self, where: str, message: str) -> None:
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class ScenarioSpec:
    """A parsed scenario document in normalized plain-data form."""

    data: dict[str, Any]

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def mode(self) -> str:
        return self.data["mode"]

    def dump(self) -> str:
        return yaml.safe_dump(self.data, sort_keys=True, default_flow_style=None)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScenarioSpec) and self.data == other.data


def _require(d: Any, key: str, where: str) -> Any:
    if not isinstance(d, dict):
        raise ScenarioError(where, "expected a mapping")
    if key not in d:
        raise ScenarioError(f"{where}.{key}" if where else key, "missing field")
    return d[key]


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ScenarioError(where, f"expected an integer, got {x!r}")
    return x


def load_scenario(text: str) -> ScenarioSpec:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "yaml"
        raise ScenarioError(where, f"YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(raw, dict):
        raise ScenarioError("document", "scenario must be a mapping")
    extra = set(raw) - TOP_KEYS
    if extra:
        raise ScenarioError(sorted(extra)[0], "unknown top-level field")
    data = copy.deepcopy(raw)
    name = _require(data, "name", "")
    if not isinstance(name, str) or not name:
        raise ScenarioError("name", "expected a non-empty string")
    data.setdefault("mode", "orthogonal")
    if data["mode"] not in MODES:
        raise ScenarioError("mode", f"expected one of {MODES}")
    _require(data, "group", "")
    data.setdefault("cocycle", {"kind": "trivial"})
    subs = _require(data, "subgroups", "")
    if not isinstance(subs, dict):
        raise ScenarioError("subgroups", "expected a mapping of roles")
    for role in ROLES[data["mode"]]:
        _require(subs, role, "subgroups")
    spec = ScenarioSpec(data)
    build_scenario(spec)  # full validation
    return spec


def load_scenario_file(path: str | Path) -> ScenarioSpec:
    p = Path(path)
    if not p.exists():
        bundled = bundled_scenario_path(str(path))
        if bundled is None:
            raise ScenarioError(str(path), "no such scenario file or bundled scenario")
        p = bundled
    return load_scenario(p.read_text())


def bundled_scenarios() -> list[str]:
    root = resources.files("fopkit") / "scenarios"
    return sorted(p.name[: -len(".scen")] for p in root.iterdir() if p.name.endswith(".scen"))


def bundled_scenario_path(name: str) -> Path | None:
    stem = name[: -len(".scen")] if name.endswith(".scen") else name
    p = resources.files("fopkit") / "scenarios" / f"{stem}.scen"
    return Path(str(p)) if p.is_file() else None


# -- building --


def _build_group(g: Any) -> FiniteGroup:
    kind = _require(g, "kind", "group")
    try:
        if kind == "elementary_abelian":
            return elementary_abelian(_int(_require(g, "n", "group"), "group.n"))
        if kind == "dihedral":
            return dihedral_affine(_int(_require(g, "n", "group"), "group.n"))
        if kind == "wreath":
            return wreath_z2_zn(_int(_require(g, "n", "group"), "group.n"))
        if kind == "generators":
            degree = g.get("degree")
            gens = []
            for k, item in enumerate(_require(g, "generators", "group")):
                gens.append(_datum(item, f"group.generators[{k}]"))
            return group_from_generators(gens, degree=degree, name=g.get("name", ""))
    except GroupError as exc:
        raise ScenarioError("group", str(exc)) from None
    raise ScenarioError("group.kind", f"unknown group kind {kind!r}")


def _datum(item: Any, where: str) -> SignedPermutation:
    try:
        if isinstance(item, dict):
            perm = _require(item, "perm", where)
            signs = item.get("signs", [1] * len(perm))
            return SignedPermutation(tuple(perm), tuple(signs))
        if isinstance(item, list):
            return SignedPermutation.plain(item)
    except (GroupError, TypeError) as exc:
        raise ScenarioError(where, str(exc)) from None
    raise ScenarioError(where, f"cannot read a signed permutation from {item!r}")


def _element(G: FiniteGroup, ref: Any, where: str) -> int:
    try:
        if isinstance(ref, bool):
            raise ScenarioError(where, "booleans are not element references")
        if isinstance(ref, int):
            if not 0 <= ref < G.order:
                raise ScenarioError(where, f"element id {ref} out of range 0..{G.order - 1}")
            return ref
        if isinstance(ref, list):
            return element_from_vector(G, [_bit(b, where) for b in ref])
        if isinstance(ref, dict):
            if "affine" in ref:
                a, b = ref["affine"]
                if G.name != f"D{G.degree}":
                    raise ScenarioError(where, "affine references need a dihedral group")
                return affine_element(G.degree, a, b)
            if "rotation" in ref:
                return wreath_element(G, _int(ref["rotation"], where), ref.get("flips", [0] * G.degree))
            if "perm" in ref:
                return G.index_of(_datum(ref, where))
    except GroupError as exc:
        raise ScenarioError(where, str(exc)) from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(where, f"bad element reference {ref!r}") from None
    raise ScenarioError(where, f"bad element reference {ref!r}")


def _bit(b: Any, where: str) -> int:
    if b not in (0, 1) or isinstance(b, bool):
        raise ScenarioError(where, f"bit vectors hold 0/1, got {b!r}")
    return b


def _build_cocycle(G: FiniteGroup, c: Any):
    if c == "trivial":
        c = {"kind": "trivial"}
    kind = _require(c, "kind", "cocycle")
    try:
        if kind == "trivial":
            return trivial_cocycle(G)
        if kind == "bilinear_form":
            return cocycle_from_bilinear_form(G, _require(c, "form", "cocycle"))
        if kind == "table":
            return cocycle_from_table(G, _require(c, "table", "cocycle"))
    except (CocycleError, ValueError) as exc:
        raise ScenarioError("cocycle", str(exc)) from None
    raise ScenarioError("cocycle.kind", f"unknown cocycle kind {kind!r}")


def _build_subgroup(G, omega, block: Any, where: str):
    if not isinstance(block, dict):
        raise ScenarioError(where, "expected a mapping")
    if "profile" in block:
        prof = block["profile"]
        if not isinstance(prof, list) or len(prof) != G.degree or any(x not in (-1, 0, 1) for x in prof):
            raise ScenarioError(f"{where}.profile", f"expected {G.degree} entries from {{0, ±1}}")
        gens, vals = [], []
        for k, r in enumerate(prof):
            if r:
                gens.append(element_from_vector(G, [1 if i == k else 0 for i in range(G.degree)]))
                vals.append(r)
        H = subgroup_generated(G, gens)
        if "character" in block:
            raise ScenarioError(f"{where}.character", "a profile already fixes the character")
        try:
            return H, character_from_generator_values(omega, H, gens, vals)
        except CocycleError as exc:
            raise ScenarioError(f"{where}.profile", str(exc)) from None
    refs = block.get("generators", [])
    if not isinstance(refs, list):
        raise ScenarioError(f"{where}.generators", "expected a list")
    gens = [_element(G, r, f"{where}.generators[{k}]") for k, r in enumerate(refs)]
    H = subgroup_generated(G, gens)
    ch = block.get("character", "trivial")
    try:
        if ch == "trivial":
            return H, trivial_character(omega, H)
        if ch == "solve":
            chi = solve_trivialization(omega, H)
            if chi is None:
                raise ScenarioError(f"{where}.character", "ω restricted to this subgroup is not a coboundary")
            return H, chi
        if isinstance(ch, dict) and "generators" in ch:
            vals = ch["generators"]
            if not isinstance(vals, list) or len(vals) != len(gens):
                raise ScenarioError(f"{where}.character.generators", "need one ±1 value per generator")
            return H, character_from_generator_values(omega, H, gens, vals)
        if isinstance(ch, dict) and "table" in ch:
            values = {}
            for k, pair in enumerate(ch["table"]):
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ScenarioError(f"{where}.character.table[{k}]", "expected [element, value]")
                values[_element(G, pair[0], f"{where}.character.table[{k}]")] = pair[1]
            return H, character_from_values(omega, H, values)
    except CocycleError as exc:
        raise ScenarioError(f"{where}.character", str(exc)) from None
    raise ScenarioError(f"{where}.character", f"unknown character form {ch!r}")


def _symbols(spec: ScenarioSpec, key: str):
    syms = (spec.data.get("symbols") or {}).get(key)
    if syms is None:
        return None
    if not isinstance(syms, list) or not all(isinstance(s, str) for s in syms):
        raise ScenarioError(f"symbols.{key}", "expected a list of names")
    return tuple(syms)


def build_scenario(spec: ScenarioSpec) -> FopScenario | AmicableScenario:
    d = spec.data
    G = _build_group(d["group"])
    omega = _build_cocycle(G, d["cocycle"])
    parts = {}
    for role in ROLES[d["mode"]]:
        parts[role] = _build_subgroup(G, omega, d["subgroups"][role], f"subgroups.{role}")
    sa, sb = _symbols(spec, "A"), _symbols(spec, "B")
    if sa and sb and set(sa) & set(sb):
        raise ScenarioError("symbols", "the two factors need disjoint symbol sets")
    if d["mode"] == "orthogonal":
        (H, chi), (Hp, chip), (K, chik) = parts["H"], parts["H_prime"], parts["K"]
        return FopScenario(spec.name, G, omega, H, chi, Hp, chip, K, chik, sa, sb)
    (H, chi), (Hp, chip) = parts["H"], parts["H_prime"]
    return AmicableScenario(spec.name, G, omega, H, chi, Hp, chip, sa, sb)
