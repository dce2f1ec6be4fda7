"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 semantic error (type,
arity, domain), 3 compiled result disagrees with the brute-force oracle.
Every option can also be set through an ``ETR_``-prefixed environment
variable, e.g. ``ETR_SCHEME``.
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click

from . import logic
from .algebra import evaluate, parse_algebra
from .catalog import Instance, as_interpretation, load_instance
from .core import sorted_indexes
from .errors import ETRError, ETRSyntaxError
from .relation import Relation

EXIT_OK, EXIT_USAGE, EXIT_SEMANTIC, EXIT_MISMATCH = 0, 1, 2, 3


class OracleMismatch(ETRError):
    def __init__(self, compiled: Relation, oracle: Relation):
        self.compiled, self.oracle = compiled, oracle
        super().__init__(
            "compiled result disagrees with the oracle:\n"
            f"compiled:\n{render_table(compiled)}\noracle:\n{render_table(oracle)}")


@dataclass(frozen=True)
class QueryRequest:
    source: str
    mode: str = "logic"
    check_oracle: bool = False
    output: str = "table"
    domain: str | None = None


def render_table(r: Relation) -> str:
    """Columns in index order, rows sorted; a relation over no indexes prints as true/false."""
    cols = sorted_indexes(r.signature)
    if not cols:
        return "true" if r.extent else "false"
    rows = r.rows()
    widths = [max([len(c)] + [len(row[k]) for row in rows]) for k, c in enumerate(cols)]
    fmt = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    lines = [fmt(cols), "-+-".join("-" * w for w in widths)]
    lines += [fmt(row) for row in rows]
    lines.append(f"({len(rows)} row{'' if len(rows) == 1 else 's'})")
    return "\n".join(lines)


def answer(instance: Instance, request: QueryRequest) -> Relation:
    if request.mode == "algebra":
        if request.check_oracle:
            raise click.UsageError("--oracle-check applies to logic queries only")
        expr = parse_algebra(request.source, instance.relations)
        return evaluate(expr, instance)
    if request.mode != "logic":
        raise click.UsageError(f"unknown mode {request.mode!r}")
    formula = logic.parse_formula(request.source)
    m = as_interpretation(instance, request.domain, _predicates(formula))
    result = logic.denote(m, formula)
    if request.check_oracle:
        oracle = logic.denote_oracle(m, formula)
        if oracle != result:
            raise OracleMismatch(result, oracle)
    return result


def _predicates(f) -> set[str]:
    match f:
        case logic.Atom(pred, _):
            return {pred}
        case logic.And(conjuncts):
            return set().union(*(_predicates(c) for c in conjuncts))
        case _:
            return _predicates(f.body)


def run_query(instance: Instance, request: QueryRequest) -> str:
    r = answer(instance, request)
    return str(len(r)) if request.output == "count" else render_table(r)


def _diagnose(err: Exception) -> tuple[str, int]:
    if isinstance(err, click.UsageError):
        return f"error: {err.format_message()}", EXIT_USAGE
    if isinstance(err, OracleMismatch):
        return f"error: {err}", EXIT_MISMATCH
    if isinstance(err, ETRSyntaxError):
        caret = err.caret()
        return f"error: {err}" + (f"\n{caret}" if caret else ""), EXIT_USAGE
    if isinstance(err, ETRError):
        return f"error: {err}", EXIT_SEMANTIC
    raise err


def _run_one(instance: Instance, request: QueryRequest) -> tuple[str, int]:
    try:
        return run_query(instance, request), EXIT_OK
    except (ETRError, click.UsageError) as e:
        return _diagnose(e)


@click.command(context_settings={"auto_envvar_prefix": "ETR", "help_option_names": ["-h", "--help"]})
@click.option("--scheme", required=True, type=click.Path(exists=True, dir_okay=False), help="Scheme file (YAML).")
@click.option("--data", type=click.Path(exists=True, file_okay=False), help="Directory of <relation>.csv files.")
@click.option("--mode", type=click.Choice(["logic", "algebra"]), default="logic", show_default=True)
@click.option("--query", help="Query text.")
@click.option("--batch", type=click.Path(exists=True, dir_okay=False), help="File with one query per line.")
@click.option("--oracle-check", is_flag=True, help="Cross-check compiled logic queries against brute force.")
@click.option("--count", is_flag=True, help="Print the number of answer tuples instead of the table.")
@click.option("--domain", help="Domain the logic front end ranges over (needed with several domains).")
@click.option("--delimiter", default=",", show_default=True, help="Field delimiter of the data files.")
def cli(scheme, data, mode, query, batch, oracle_check, count, domain, delimiter):
    """Evaluate predicate-calculus or algebra queries over a relational instance."""
    if (query is None) == (batch is None):
        raise click.UsageError("give exactly one of --query and --batch")
    if delimiter == "\\t":
        delimiter = "\t"
    try:
        instance = load_instance(scheme, data, delimiter)
    except ETRError as e:
        msg, code = _diagnose(e)
        click.echo(msg, err=True)
        sys.exit(code)

    output = "count" if count else "table"
    if query is not None:
        sources = [query]
    else:
        lines = Path(batch).read_text(encoding="utf-8").splitlines()
        sources = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    requests = [QueryRequest(s, mode, oracle_check, output, domain) for s in sources]
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda r: _run_one(instance, r), requests))

    code = EXIT_OK
    for k, (text, rc) in enumerate(results):
        if k:
            click.echo("")
        if rc == EXIT_OK:
            click.echo(text)
        else:
            click.echo(text, err=True)
        code = max(code, rc)
    sys.exit(code)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["QueryRequest", "run_query", "render_table", "main", "OracleMismatch"]
