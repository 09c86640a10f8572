"""Command implementations producing deterministic report dictionaries.

Reports are plain dicts with a fixed key insertion order so their JSON
serialization is byte-stable for a fixed input and tool version.  The only
floating-point entries are operator-norm estimates, which come from a
deterministic iteration.
"""

from __future__ import annotations

import json
from typing import Any

from . import __version__
from .freeness import (
    NotFoundUpTo,
    Unstable,
    Verdict,
    Witness,
    freeness_report,
    is_minimal,
    pure_infiniteness_witness,
)
from .orbits import lambda_matrix, operator_norm, orbit_basis, orbit_sum_matrix, reduced_norm_probe
from .scenario import Scenario
from .sections import Section
from .topology import ConstructibleSet, OpenSet, UPPoint

__all__ = ["RouteDisagreement", "run_command", "render_text", "to_json"]


class RouteDisagreement(AssertionError):
    """Two independent decision routes disagreed; always a bug."""


def _set_info(s: ConstructibleSet) -> dict:
    empty = s.is_empty()
    info: dict[str, Any] = {"is_empty": empty}
    if not empty:
        info["sample"] = str(s.sample_point())
        info["has_empty_interior"] = s.has_empty_interior()
    return info


def _open_info(u: OpenSet) -> dict:
    info: dict[str, Any] = {"is_empty": u.is_empty(), "is_full": u.is_full()}
    if not u.is_empty():
        info["sample"] = str(u.sample_point())
    return info


def _verdict_json(v: Verdict) -> dict:
    out: dict[str, Any] = {"holds": v.holds, "exact": v.exact}
    if v.witness is not None:
        out["witness"] = v.witness
    if v.bound is not None:
        out["bound"] = v.bound
    return out


def run_validate(scn: Scenario, opts: dict) -> dict:
    report = scn.system.validate_system(opts.get("bound"))
    return {
        "ok": report.ok,
        "violations": [
            {"axiom": v.axiom, "labels": list(v.labels), "detail": str(v)} for v in report.violations
        ],
    }


def run_report(scn: Scenario, opts: dict) -> dict:
    gs = scn.system
    bound = opts.get("bound", 2)
    depth = opts.get("depth", 2)
    length = opts.get("length", 2)
    fr = freeness_report(gs, bound)
    dangerous = gs.dangerous_set(bound)
    minimal = is_minimal(gs, depth=depth, iter_cap=opts.get("iter_cap", 64))
    pure = pure_infiniteness_witness(gs, OpenSet.full(gs.space), depth=depth, length=length)
    out: dict[str, Any] = {
        "hausdorff": fr.hausdorff,
        "bound": bound,
        "verdicts": {k: _verdict_json(v) for k, v in fr.verdicts().items()},
        "fix_sets": [
            {"label": lab, "fix": _set_info(fx), "reduced_fix": _set_info(ufx)}
            for lab, fx, ufx in fr.per_label
        ],
        "dangerous_set": {**_set_info(dangerous), "is_meagre": dangerous.is_meagre()},
    }
    if isinstance(minimal, Unstable):
        out["minimal"] = {"unstable_after": minimal.iterations}
        out["exit_hint"] = 3
    else:
        out["minimal"] = _verdict_json(minimal)
    if isinstance(pure, Witness):
        out["pure_infiniteness"] = {
            "found": True,
            "cell": _open_info(pure.cell),
            "labels": list(pure.labels),
        }
    else:
        out["pure_infiniteness"] = {"found": False, "depth": pure.depth, "length": pure.length}
    _check_report_invariants(out)
    return out


def _check_report_invariants(out: dict) -> None:
    v = out["verdicts"]
    eff, free = v["effective"]["holds"], v["topologically_free"]["holds"]
    as_free, principal = v["as_topologically_free"]["holds"], v["topologically_principal"]["holds"]
    if eff and not free:
        raise RouteDisagreement("effective system failed topological freeness")
    if principal and not as_free:
        raise RouteDisagreement("principal system failed the finite-union condition")
    if as_free and not free:
        raise RouteDisagreement("finite-union condition held without topological freeness")
    if free != as_free:
        raise RouteDisagreement("freeness and its finite-union variant disagreed")
    if out["hausdorff"] and eff != free:
        raise RouteDisagreement("effective and topologically free disagreed on a closed-unit system")


def run_eval(scn: Scenario, opts: dict) -> dict:
    names = opts.get("sections") or sorted(scn.sections)
    out: dict[str, Any] = {"sections": {}}
    for name in names:
        f = scn.sections[name]
        nf = f.normal_form()
        out["sections"][name] = {
            "terms": f.render(),
            "is_zero": f.is_zero(),
            "normal_form": [
                {
                    "class": f.gs.display(lab),
                    "coefficient": str(c),
                    "cell_sample": str(cell.sample_point()),
                    "cell_empty_interior": cell.has_empty_interior(),
                }
                for cell, lab, c in nf.entries
            ],
            "expectation": f.expectation().render(),
        }
    pairs = []
    for i, a in enumerate(names):
        for b in names[i:]:
            prod = scn.sections[a].mul(scn.sections[b])
            pairs.append({"product": f"{a}·{b}", "is_zero": prod.is_zero(), "terms": prod.render()})
    out["products"] = pairs
    return out


def run_singular(scn: Scenario, opts: dict) -> dict:
    names = opts.get("sections") or sorted(scn.sections)
    out: dict[str, Any] = {"sections": {}, "essential_equalities": []}
    for name in names:
        f = scn.sections[name]
        singular = f.is_singular()
        via_kernel = f.el_kernel_member()
        if singular != via_kernel:
            raise RouteDisagreement(
                f"singularity routes disagree on {name}: support {singular}, kernel {via_kernel}"
            )
        out["sections"][name] = {
            "is_zero": f.is_zero(),
            "is_singular": singular,
            "el_kernel_member": via_kernel,
        }
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            out["essential_equalities"].append(
                {"pair": f"{a} ~ {b}", "ess_equal": scn.sections[a].ess_equal(scn.sections[b])}
            )
    return out


def run_orbit(scn: Scenario, opts: dict) -> dict:
    names = opts.get("sections") or sorted(scn.sections)
    bound = opts.get("bound", 2)
    tol = opts.get("tol", 1e-9)
    out: dict[str, Any] = {"sections": {}}
    points = list(scn.points.items())
    for name in names:
        f = scn.sections[name]
        entry: dict[str, Any] = {"at": {}}
        for pname, x in points:
            basis = orbit_basis(f.gs, x, bound)
            m = lambda_matrix(f, x, bound)
            orbit_pts, sum_matrix = orbit_sum_matrix(f, x, bound)
            entry["at"][pname] = {
                "point": str(x),
                "basis": [f.gs.display(a.label) for a in basis.arrows],
                "truncated": basis.truncated,
                "matrix": m.render(),
                "matrix_norm": operator_norm(m, tol),
                "orbit_points": [str(p) for p in orbit_pts],
                "orbit_sum_matrix": [[str(e) for e in row] for row in sum_matrix],
            }
        probe = reduced_norm_probe(f, None, bound, tol)
        entry["reduced_norm_probe"] = {
            "value": probe.value,
            "status": "exact" if probe.exact else "lower_bound",
        }
        out["sections"][name] = entry
    return out


_COMMANDS = {
    "validate": run_validate,
    "report": run_report,
    "eval": run_eval,
    "singular": run_singular,
    "orbit": run_orbit,
}


def run_command(command: str, scn: Scenario, opts: dict | None = None) -> dict:
    if command not in _COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    opts = opts or {}
    results = _COMMANDS[command](scn, opts)
    report: dict[str, Any] = {
        "scenario": scn.name,
        "command": command,
        "version": __version__,
        "options": {
            k: opts[k] for k in sorted(opts) if k in ("bound", "depth", "length", "tol", "seed")
        },
        "results": results,
    }
    return report


def to_json(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2) + "\n"


def render_text(report: dict, indent: str = "") -> str:
    """Stable flat text rendering of a report dictionary."""
    lines: list[str] = []

    def walk(obj, prefix):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(v, f"{prefix}{k}." if isinstance(v, (dict, list)) else f"{prefix}{k}")
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(v, f"{prefix}{i}." if isinstance(v, (dict, list)) else f"{prefix}{i}")
        else:
            lines.append(f"{prefix} = {obj}")

    walk(report, indent)
    return "\n".join(lines) + "\n"
