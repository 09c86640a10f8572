"""Command line interface.

  etale-lab validate SCENARIO [--bound N]
  etale-lab report   SCENARIO [--bound N --depth N --len N]
  etale-lab eval     SCENARIO [--section NAME ...]
  etale-lab singular SCENARIO [--section NAME ...]
  etale-lab orbit    SCENARIO [--section NAME ... --bound N --tol R]
  etale-lab gallery  [NAME] [--regen DIR]
  etale-lab selftest [--seed N --cases N]

Exit codes: 0 success, 1 invalid scenario, 2 internal invariant violation
(route disagreement; always a bug), 3 bound exceeded or unstable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .freeness import Unstable
from .gallery import GALLERY, GalleryMismatch, run_gallery_entry, write_fixture
from .germs import GermAxiomError, UndefinedProductError
from .orbits import NonConvergenceError
from .runner import RouteDisagreement, render_text, run_command, to_json
from .scenario import Scenario, ScenarioError, load
from .selftest import DEFAULT_SEED, run_all
from .semigroups import CapExceeded, SemigroupAxiomError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INTERNAL = 2
EXIT_BOUND = 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="etale-lab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"etale-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        q = sub.add_parser(name, help=help_text)
        q.add_argument("scenario", help="scenario JSON file")
        q.add_argument("--bound", type=int, default=2, help="composition bound (regime B)")
        q.add_argument("--depth", type=int, default=2, help="cylinder depth for searches")
        q.add_argument("--len", dest="length", type=int, default=2, help="composition length for searches")
        q.add_argument("--tol", type=float, default=1e-9, help="norm tolerance")
        q.add_argument("--section", action="append", default=None, help="restrict to a named section")
        q.add_argument("--json", dest="as_json", action="store_true", help="JSON output (default)")
        q.add_argument("--text", dest="as_text", action="store_true", help="flat text output")
        return q

    scenario_cmd("validate", "check the scenario against the germ-system axioms")
    scenario_cmd("report", "freeness, Hausdorffness, dangerous points, minimality, shrinking witness")
    scenario_cmd("eval", "normal forms, expectations and products of the scenario's sections")
    scenario_cmd("singular", "singularity and essential-equality verdicts along both routes")
    scenario_cmd("orbit", "orbit bases, representation matrices and norm probes")

    g = sub.add_parser("gallery", help="run built-in scenarios against frozen expectations")
    g.add_argument("name", nargs="?", default=None, help=f"one of: {', '.join(GALLERY)}")
    g.add_argument("--regen", metavar="DIR", default=None, help="regenerate fixtures into DIR")
    g.add_argument("--json", dest="as_json", action="store_true")
    g.add_argument("--text", dest="as_text", action="store_true")

    s = sub.add_parser("selftest", help="seeded randomized cross-module invariant suites")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--cases", type=int, default=None, help="override the per-suite case count")
    s.add_argument("--json", dest="as_json", action="store_true")
    s.add_argument("--text", dest="as_text", action="store_true")
    return p


def _emit(report: dict, args) -> None:
    if getattr(args, "as_text", False) and not getattr(args, "as_json", False):
        sys.stdout.write(render_text(report))
    else:
        sys.stdout.write(to_json(report))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gallery":
            return _gallery(args)
        if args.command == "selftest":
            report = run_all(args.seed, args.cases)
            _emit(report, args)
            return EXIT_OK if report["ok"] else EXIT_INTERNAL
        scn = load(args.scenario)
        opts = {
            "bound": args.bound,
            "depth": args.depth,
            "length": args.length,
            "tol": args.tol,
            "sections": args.section,
        }
        report = run_command(args.command, scn, opts)
        _emit(report, args)
        if args.command == "validate" and not report["results"]["ok"]:
            return EXIT_INVALID
        if report["results"].get("exit_hint") == 3:
            return EXIT_BOUND
        return EXIT_OK
    except (ScenarioError, SemigroupAxiomError, GermAxiomError, UndefinedProductError) as e:
        print(f"invalid scenario: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as e:
        print(f"cannot read scenario: {e}", file=sys.stderr)
        return EXIT_INVALID
    except RouteDisagreement as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (CapExceeded, NonConvergenceError) as e:
        print(f"bound exceeded: {e}", file=sys.stderr)
        return EXIT_BOUND


def _gallery(args) -> int:
    names = [args.name] if args.name else list(GALLERY)
    for name in names:
        if name not in GALLERY:
            print(f"unknown gallery scenario {name!r}", file=sys.stderr)
            return EXIT_INVALID
    if args.regen:
        directory = Path(args.regen)
        directory.mkdir(parents=True, exist_ok=True)
        for name in names:
            path = write_fixture(name, directory)
            print(f"wrote {path}", file=sys.stderr)
        return EXIT_OK
    out = {"gallery": [], "version": __version__}
    try:
        for name in names:
            report, _ = run_gallery_entry(name, check=True)
            out["gallery"].append({"name": name, "ok": True, "runs": report["runs"]})
    except GalleryMismatch as e:
        print(f"gallery mismatch: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except RouteDisagreement as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(out, args)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
