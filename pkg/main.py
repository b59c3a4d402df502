"""
main.py
=======
 - Parses the command line and loads a scenario (file or bundled)
 - Loads task handlers and runs the scenario
 - Prints the report and writes records, CSV tables and profile plots
"""

import argparse
import asyncio
import sys
from pathlib import Path

# Import the logger configuration
from logger import logger

from config import WorkbenchConfig
from errors import ScenarioParseError
from graphs import ProfileGraphs
from runner import ScenarioRunner
from scenario import parse_scenario
from store import RecordStore

SCENARIO_DIR = Path(__file__).parent / "scenarios"


def bundled_scenarios():
    return {path.stem: path for path in sorted(SCENARIO_DIR.glob("*.json"))}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Noncommutative Bayesian inference workbench")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--scenario", type=Path, help="path to a scenario JSON file")
    source.add_argument("--bundled", help="name of a bundled scenario")
    source.add_argument("--list-bundled", action="store_true", help="list bundled scenarios and task kinds")
    parser.add_argument("--out", default=None, help=f"output directory (default {WorkbenchConfig.OUT_DIR})")
    parser.add_argument("--format", choices=("text", "records"), default="text")
    parser.add_argument("--tol", type=float, default=None, help="override the scenario tolerance")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    return parser


def write_outputs(report, out_dir):
    store = RecordStore(out_dir)
    store.write_report(report)
    for record in report.records:
        for name, table in sorted(record.tables.items()):
            if not name.startswith("profile_"):
                continue
            try:
                buf, stats = ProfileGraphs.create_profile_graph(table, f"{report.scenario}: {name}")
                store.write_bytes(report, f"task{record.index}_{name}.png", buf)
                logger.debug(f"Plotted {name}: worst relative deviation {stats['worst_rel_dev']:.4f}")
            except Exception as e:
                logger.error(f"Failed to plot {name}: {e}")


async def list_bundled():
    runner = ScenarioRunner()
    await runner.setup_hook()
    print("Bundled scenarios:")
    for name in bundled_scenarios():
        print(f"  {name}")
    print("Task kinds:")
    for kind, handler in sorted(runner.handlers.items()):
        print(f"  {kind:<22} {handler.task_description}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and args.seed < 0:
        logger.error("--seed must be an unsigned integer")
        return 2

    if args.list_bundled:
        asyncio.run(list_bundled())
        return 0

    if args.bundled:
        path = bundled_scenarios().get(args.bundled)
        if path is None:
            logger.error(f"No bundled scenario named '{args.bundled}'")
            return 2
    elif args.scenario:
        path = args.scenario
    else:
        logger.error("Nothing to run: pass --scenario, --bundled or --list-bundled")
        return 2

    try:
        scenario = parse_scenario(path.read_text(encoding="utf-8"))
    except (OSError, ScenarioParseError) as e:
        logger.error(f"Could not load scenario {path}: {e}")
        return 2

    runner = ScenarioRunner(args.tol, args.seed)
    try:
        report = asyncio.run(runner.start(scenario))
    except Exception as e:
        logger.error(f"Runner encountered an error: {e}")
        return 2

    sys.stdout.write(report.to_records() if args.format == "records" else report.to_text())
    try:
        write_outputs(report, args.out)
    except OSError as e:
        logger.error(f"Could not write outputs: {e}")
        return 2
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
