# src/scpkit/cli.py

import json
import logging
import sys
from contextlib import nullcontext
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table
from rich.text import Text
from rich.tree import Tree

from .config import Suite, SuiteConfig
from .linearity import LinDerivation, lin_check
from .metatheory import enumerate_typed_cp, run_suites
from .reduction import EquivDerivation, ReductionStep, Strategy, enumerate_steps, equiv_check, step, trace
from .syntax import Calculus, Cut, Name, Process, TypingContext, free_names, show_judgment, show_process
from .textio import (
    ParseError,
    derivation_to_json,
    equiv_to_json,
    lin_to_json,
    parse_name,
    parse_source,
    step_to_json,
)
from .translation import decode, decode_derivation, encode, encode_derivation
from .typecheck import Derivation, ScpDerivation, TypingError, cp_derive, scp_derive

app = typer.Typer(help="Type checker, translator and reducer for CP and SCP session-typed processes")
console = Console()
err_console = Console(stderr=True)

log = logging.getLogger(__name__)


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Log which rule failed, and where.")):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def fail(message: str, code: int = 1) -> typer.Exit:
    console.print(f"[red]{message}[/red]")
    return typer.Exit(code)


def read_source(path: str) -> str:
    """Read a term file, or stdin for `-`."""
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise fail(f"File not found: {escape(path)}", 2)
    except (OSError, UnicodeDecodeError) as error:
        raise fail(f"Cannot read {escape(path)}: {escape(str(error))}", 2) from error


def resolve_calculus(path: str, calculus: Optional[Calculus]) -> Calculus:
    """An explicit --calculus wins; otherwise the file extension decides, defaulting to SCP."""
    if calculus is not None:
        return Calculus(calculus)
    if Path(path).suffix.lower() == ".cp":
        return Calculus.CP
    return Calculus.SCP


def load(path: str, calculus: Optional[Calculus]) -> tuple[TypingContext | None, Process]:
    try:
        return parse_source(read_source(path), calculus)
    except ParseError as error:
        raise fail(f"Parse error in {escape(path)}: {escape(str(error))}", 2) from error


def load_judgment(path: str, calculus: Optional[Calculus]) -> tuple[TypingContext, Process]:
    ctx, p = load(path, calculus)
    if ctx is None:
        raise fail(f"{escape(path)} holds a bare process; this command needs a judgment `ctx |- P`", 2)
    return ctx, p


def names_option(raw: str) -> list[Name]:
    try:
        return [parse_name(part) for part in raw.split(",") if part.strip()]
    except ParseError as error:
        raise fail(f"Invalid --lin value: {escape(str(error))}", 2) from error


def emit_json(data) -> None:
    typer.echo(json.dumps(data, ensure_ascii=False, indent=2))


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def lin_tree(d: LinDerivation, unicode: bool, tree: Tree | None = None) -> Tree:
    label = Text.assemble((str(d.rule), "bold magenta"), "  ", f"lin({d.subject}; {show_process(d.process, unicode)})")
    node = Tree(label) if tree is None else tree.add(label)
    for premise in d.premises:
        lin_tree(premise, unicode, node)
    return node


def derivation_tree(d: Derivation, unicode: bool, tree: Tree | None = None) -> Tree:
    label = Text.assemble((str(d.rule), "bold cyan"), "  ", show_judgment(d.context, d.process, unicode))
    node = Tree(label) if tree is None else tree.add(label)
    if isinstance(d, ScpDerivation):
        for lin in d.lin_premises:
            lin_tree(lin, unicode, node)
    for premise in d.premises:
        derivation_tree(premise, unicode, node)
    return node


def equiv_tree(e: EquivDerivation, unicode: bool, tree: Tree | None = None) -> Tree:
    where = f"  [{'.'.join(map(str, e.position))}]" if e.position else ""
    label = Text.assemble(
        (str(e.rule), "bold cyan"),
        "  ",
        f"{show_process(e.left, unicode)}  ≡  {show_process(e.right, unicode)}",
        (where, "dim"),
    )
    node = Tree(label) if tree is None else tree.add(label)
    for premise in e.premises:
        equiv_tree(premise, unicode, node)
    return node


def print_step(s: ReductionStep, unicode: bool) -> None:
    position = ".".join(map(str, s.position)) or "top"
    console.print(Text.assemble((f"{s.rule}", "bold cyan"), (f" ({s.redex_rule} at {position})", "dim")))
    console.print(Text(f"  {show_process(s.target, unicode)}"))


# ---------------------------------------------------------------------------
# Typing
# ---------------------------------------------------------------------------


@app.command()
def check(
    file: str = typer.Argument(..., help="Judgment file (`ctx |- P`), or - for stdin."),
    calculus: Optional[Calculus] = typer.Option(None, "--calculus", "-c", help="cp or scp. Defaults to the file extension."),
    lin: Optional[str] = typer.Option(None, "--lin", help="Comma-separated names that must be linear (SCP)."),
    lin_all: bool = typer.Option(False, "--lin-all", help="Require every context name to be linear (SCP)."),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON document instead of a tree."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """
    Type-check a judgment and print its derivation.

        uv run scpkit check example.scp --lin-all
    """
    calc = resolve_calculus(file, calculus)
    ctx, p = load_judgment(file, calc)
    if (lin or lin_all) and calc is Calculus.CP:
        raise fail("--lin and --lin-all apply to SCP judgments only", 2)
    wanted = list(ctx.names()) if lin_all else names_option(lin) if lin else []

    report: dict = {"calculus": str(calc), "judgment": show_judgment(ctx, p)}
    try:
        derivation = cp_derive(ctx, p) if calc is Calculus.CP else scp_derive(ctx, p)
    except TypingError as error:
        log.debug("typing failed: %s", error)
        if json_output:
            emit_json({**report, "derivable": False, "error": str(error)})
            raise typer.Exit(1)
        raise fail(f"✗ not derivable: {escape(str(error))}")

    lins: dict[Name, LinDerivation] = {}
    missing = None
    for x in wanted:
        found = lin_check(x, p)
        if found is None:
            missing = x
            break
        lins[x] = found

    if json_output:
        emit_json(
            {
                **report,
                "derivable": True,
                "derivation": derivation_to_json(derivation),
                "lin": {str(x): lin_to_json(d) for x, d in lins.items()},
                **({"error": f"no linearity derivation for {missing}"} if missing is not None else {}),
            }
        )
        if missing is not None:
            raise typer.Exit(1)
        return

    console.print(f"[green]✓ derivable[/green] in {calc.upper()}")
    console.print(derivation_tree(derivation, unicode))
    for x, d in lins.items():
        console.print(f"[green]✓ lin({escape(str(x))})[/green]")
        console.print(lin_tree(d, unicode))
    if missing is not None:
        raise fail(f"✗ no linearity derivation for {escape(str(missing))}")


@app.command()
def lin(
    file: str = typer.Argument(..., help="SCP process or judgment file, or - for stdin."),
    channel: str = typer.Option(..., "--channel", "-x", help="The name to check."),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON document instead of a tree."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """Decide lin(x; P) and print its derivation."""
    _, p = load(file, Calculus.SCP)
    x = names_option(channel)
    if len(x) != 1:
        raise fail("--channel takes exactly one name", 2)
    d = lin_check(x[0], p)
    if json_output:
        emit_json({"channel": str(x[0]), "linear": d is not None, "derivation": lin_to_json(d) if d else None})
        if d is None:
            raise typer.Exit(1)
        return
    if d is None:
        raise fail(f"✗ no linearity derivation for {escape(str(x[0]))}")
    console.print(f"[green]✓ lin({escape(str(x[0]))})[/green]")
    console.print(lin_tree(d, unicode))


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------


@app.command(name="step")
def step_command(
    file: str = typer.Argument(..., help="Process or judgment file, or - for stdin."),
    calculus: Optional[Calculus] = typer.Option(None, "--calculus", "-c", help="cp or scp. Defaults to the file extension."),
    strategy: Strategy = typer.Option(Strategy.FIRST, "--strategy", "-s", help="How to pick a redex."),
    index: Optional[int] = typer.Option(None, "--index", "-i", help="Apply the redex with this index from --list."),
    equiv_depth: int = typer.Option(0, "--equiv-depth", help="Also reduce up to this many ≡ rewrites away."),
    list_only: bool = typer.Option(False, "--list", "-l", help="List every redex instead of applying one."),
    json_output: bool = typer.Option(False, "--json", help="Print JSON."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """List the redexes of a process, or apply one of them."""
    _, p = load(file, resolve_calculus(file, calculus))
    closure = {"use_equiv_closure": equiv_depth > 0, "equiv_depth": equiv_depth}

    if list_only:
        steps = enumerate_steps(p, **closure)
        if json_output:
            emit_json([step_to_json(s) for s in steps])
        else:
            table = Table(box=None, padding=(0, 2))
            table.add_column("#", style="bold cyan", justify="right")
            table.add_column("Rule")
            table.add_column("Redex", style="dim")
            table.add_column("At", style="dim")
            table.add_column("Target")
            for i, s in enumerate(steps):
                table.add_row(
                    str(i),
                    str(s.rule),
                    str(s.redex_rule),
                    ".".join(map(str, s.position)) or "top",
                    Text(show_process(s.target, unicode)),
                )
            console.print(table)
        if not steps:
            raise typer.Exit(1) if json_output else fail("no redex")
        return

    try:
        chosen = step(p, strategy, index=index, **closure)
    except ValueError as error:
        raise fail(escape(str(error)), 2) from error
    if chosen is None:
        if json_output:
            emit_json(None)
            raise typer.Exit(1)
        raise fail("no redex")
    if json_output:
        emit_json(step_to_json(chosen))
        return
    print_step(chosen, unicode)


@app.command()
def normalize(
    file: str = typer.Argument(..., help="Process or judgment file, or - for stdin."),
    calculus: Optional[Calculus] = typer.Option(None, "--calculus", "-c", help="cp or scp. Defaults to the file extension."),
    strategy: Strategy = typer.Option(Strategy.FIRST, "--strategy", "-s", help="How to pick each redex."),
    max_steps: int = typer.Option(100, "--max-steps", "-n", min=0, help="Stop after this many steps."),
    equiv_depth: int = typer.Option(0, "--equiv-depth", help="Also reduce up to this many ≡ rewrites away."),
    json_output: bool = typer.Option(False, "--json", help="Print JSON."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """
    Reduce until no redex is left and print the trace.

    Exits with 1 when the result still has a cut at the top.
    """
    _, p = load(file, resolve_calculus(file, calculus))
    steps = trace(p, strategy, max_steps, use_equiv_closure=equiv_depth > 0, equiv_depth=equiv_depth)
    final = steps[-1].target if steps else p
    stuck = isinstance(final, Cut)

    if json_output:
        emit_json({"steps": [step_to_json(s) for s in steps], "result": str(final), "stuck": stuck})
    else:
        for i, s in enumerate(steps, 1):
            console.print(f"[dim]{i}.[/dim]", end=" ")
            print_step(s, unicode)
        console.print(Text.assemble(("result  ", "bold"), show_process(final, unicode)))
    if stuck:
        if not json_output:
            console.print(f"[yellow]stopped with a cut on {escape(str(final.x))}[/yellow]")
        raise typer.Exit(1)


@app.command()
def equiv(
    file_a: str = typer.Argument(..., help="First process file."),
    file_b: str = typer.Argument(..., help="Second process file."),
    depth: int = typer.Option(3, "--depth", "-d", min=0, help="Maximum number of ≡ rewrites to search."),
    json_output: bool = typer.Option(False, "--json", help="Print JSON."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """Search for a structural equivalence between two processes."""
    _, p = load(file_a, None)
    _, q = load(file_b, None)
    found = equiv_check(p, q, depth)
    if json_output:
        emit_json({"equivalent": found is not None, "derivation": equiv_to_json(found) if found else None})
        if found is None:
            raise typer.Exit(1)
        return
    if found is None:
        raise fail(f"✗ not equivalent within {depth} rewrites")
    console.print("[green]✓ equivalent[/green]")
    console.print(equiv_tree(found, unicode))


# ---------------------------------------------------------------------------
# Translation
# ---------------------------------------------------------------------------


@app.command()
def translate(
    file: str = typer.Argument(..., help="Process or judgment file, or - for stdin."),
    to: Calculus = typer.Option(..., "--to", "-t", help="Target calculus."),
    with_derivation: bool = typer.Option(False, "--with-derivation", help="Translate the typing derivation as well."),
    json_output: bool = typer.Option(False, "--json", help="Print JSON."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """Translate a CP process into SCP, or a linear SCP process back into CP."""
    source = Calculus.CP if to is Calculus.SCP else Calculus.SCP
    ctx, p = load(file, source)

    if not with_derivation:
        out = encode(p) if to is Calculus.SCP else decode(p)
        if json_output:
            emit_json({"calculus": str(to), "process": str(out)})
        else:
            console.print(Text(show_process(out, unicode)))
        return

    if ctx is None:
        raise fail("--with-derivation needs a judgment `ctx |- P`", 2)
    try:
        if to is Calculus.SCP:
            derivation, lins = encode_derivation(cp_derive(ctx, p))
        else:
            d = scp_derive(ctx, p)
            lins = {}
            for x in ctx.restrict(free_names(p)).names():
                found = lin_check(x, p)
                if found is None:
                    raise fail(f"✗ no linearity derivation for {escape(str(x))}")
                lins[x] = found
            derivation = decode_derivation(d, lins)
            lins = {}
    except TypingError as error:
        raise fail(f"✗ not derivable: {escape(str(error))}") from error
    except ValueError as error:
        raise fail(f"✗ {escape(str(error))}") from error

    if json_output:
        emit_json(
            {
                "calculus": str(to),
                "process": str(derivation.process),
                "derivation": derivation_to_json(derivation),
                "lin": {str(x): lin_to_json(d) for x, d in lins.items()},
            }
        )
        return
    console.print(Text(show_judgment(derivation.context, derivation.process, unicode)))
    console.print(derivation_tree(derivation, unicode))
    for x, d in lins.items():
        console.print(f"[green]lin({escape(str(x))})[/green]")
        console.print(lin_tree(d, unicode))


# ---------------------------------------------------------------------------
# Generation and properties
# ---------------------------------------------------------------------------


@app.command(name="enumerate")
def enumerate_command(
    size: int = typer.Option(2, "--size", "-n", min=0, help="Largest process size."),
    calculus: Calculus = typer.Option(Calculus.CP, "--calculus", "-c", help="Print CP judgments or their SCP images."),
    json_output: bool = typer.Option(False, "--json", help="Print JSON."),
    unicode: bool = typer.Option(False, "--unicode", "-u", help="Print types with ⊗ ⅋ ⊕ ⊥."),
):
    """Print every CP-typable judgment up to a process size, one per line."""
    judgments = []
    for ctx, p, derivation in enumerate_typed_cp(size):
        if calculus is Calculus.SCP:
            p = encode_derivation(derivation)[0].process
        judgments.append((ctx, p))

    if json_output:
        emit_json([{"context": [[str(x), str(a)] for x, a in ctx], "process": str(p)} for ctx, p in judgments])
        return
    for ctx, p in judgments:
        typer.echo(show_judgment(ctx, p, unicode))


def load_suite_config(path: Path) -> dict:
    """Load a JSON suite config; an optional `version` key is ignored."""
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise fail(f"Config file not found: {escape(str(path))}", 2)
    except json.JSONDecodeError as error:
        raise fail(f"Invalid JSON in config file: {escape(str(error))}", 2) from error
    if not isinstance(data, dict):
        raise fail("Invalid config: expected a JSON object", 2)
    data.pop("version", None)
    return data


@app.command()
def properties(
    suite: Optional[Suite] = typer.Option(None, "--suite", help="Which property suite to run."),
    seed: Optional[int] = typer.Option(None, "--seed", envvar="SCPKIT_SEED", help="Seed for generated instances."),
    count: Optional[int] = typer.Option(None, "--count", help="Number of generated instances."),
    size: Optional[int] = typer.Option(None, "--size", help="Bound for the exhaustive sweep."),
    max_depth: Optional[int] = typer.Option(None, "--max-depth", help="Depth bound for generated instances."),
    equiv_depth: Optional[int] = typer.Option(None, "--equiv-depth", help="≡ rewrites explored per instance."),
    config: Optional[Path] = typer.Option(None, "--config", help="JSON file with suite settings; options override it."),
    json_output: bool = typer.Option(False, "--json", help="Print a JSON report."),
):
    """
    Run the metatheory property suites.

        uv run scpkit properties --suite all --seed 7 --count 500
    """
    values = load_suite_config(config) if config is not None else {}
    overrides = {
        "suite": suite,
        "seed": seed,
        "count": count,
        "size": size,
        "max_depth": max_depth,
        "equiv_depth": equiv_depth,
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        cfg = SuiteConfig.from_config(values)
    except ValueError as error:
        raise fail(f"Invalid config: {escape(str(error))}", 2) from error

    with console.status("[bold green]Checking properties...") if not json_output else nullcontext():
        reports = run_suites(cfg)
    ok = all(r.ok for r in reports)

    if json_output:
        emit_json({"config": cfg.to_config(), "ok": ok, "reports": [r.to_json() for r in reports]})
    else:
        table = Table(box=None, padding=(0, 2))
        table.add_column("Suite", style="white")
        table.add_column("Checked", justify="right")
        table.add_column("Violations", justify="right")
        table.add_column("Rejected", justify="right", style="dim")
        for r in reports:
            bad = f"[red]{len(r.violations)}[/red]" if r.violations else "[green]0[/green]"
            table.add_row(str(r.suite), str(r.checked), bad, str(len(r.rejected)))
        console.print(table)
        for r in reports:
            for v in r.violations[:10]:
                console.print(f"  [red]{escape(v.check)}[/red]  {escape(v.instance)}  [dim]{escape(v.detail)}[/dim]")
        console.print("[green]✓ no violations[/green]" if ok else "[red]✗ violations found[/red]")
    if not ok:
        raise typer.Exit(1)


if __name__ == "__main__":
    app()
