"""Command-line surface: one subcommand per repository operation.

Exit codes: 0 on success, 1 on domain errors (not found, unreachable
remote, ...), 2 on usage errors. Read subcommands print aligned tables on
terminals and JSON with ``--json``.
"""

from __future__ import annotations

import json
import sys
from datetime import date, timedelta
from pathlib import Path

import click

from . import __version__, locate
from .config import apply_config_defaults, load_config, remote_from_spec, save_config
from .envelope import KINDS
from .errors import ArcvaultError
from .ingest import envelope_from_file
from .locate import resolve_local, resolve_reader
from .provenance import emit_lockfile, get_session, history
from .publish import create_md_gallery, render_hook
from .remote import copy_artifacts, zip_repo
from .repo import check_integrity, create_repo, delete_repo, show_repo, summarize_repo
from .search import DateRange, aread, search
from .store import load_artifact, remove_artifacts, save_artifact
from .watch import DEFAULT_RULES, scan_once, watch_loop


def _fail(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(1)


def _resolve(repo_spec: str | None):
    """Turn the --repo option into a locator (local path, remote spec, or None)."""
    if repo_spec is None:
        return None
    path = Path(repo_spec)
    if (path / "backpack.db").is_file():
        return path
    looks_remote = "://" in repo_spec or (
        not path.exists()
        and "/" in repo_spec.strip("/")
        and not repo_spec.startswith((".", "/", "~"))
    )
    if looks_remote:
        options = load_config().get("options", {})
        return remote_from_spec(
            repo_spec, branch=options.get("branch"), ttl=options.get("cacheTtlSeconds")
        )
    return path  # let Repository raise NotARepo with the real path


def _table(rows: list[tuple[str, ...]], headers: tuple[str, ...]) -> str:
    table = [headers] + rows
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
    return "\n".join(lines)


repo_option = click.option("--repo", "repo_spec", default=None, help="Repository locator (path, user/repo, or URL).")
json_option = click.option("--json", "as_json", is_flag=True, help="Print JSON instead of a table.")


@click.group()
@click.version_option(__version__, prog_name="arcvault")
def main():
    """Content-addressed artifact repository."""
    apply_config_defaults()


def run():  # console entry point with domain-error handling
    try:
        main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.exceptions.Abort:
        sys.exit(2)
    except ValueError as exc:
        click.echo(f"usage error: {exc}", err=True)
        sys.exit(2)
    except ArcvaultError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--default", "set_default", is_flag=True, help="Also persist as the default local repository.")
def init(path, set_default):
    """Create a new repository (no-op when it already exists)."""
    create_repo(path, default=set_default)
    if set_default:
        config = load_config()
        config["defaultLocalRepo"] = str(Path(path).resolve())
        save_config(config)
    click.echo(f"repository ready at {path}")


@main.command()
@click.argument("path", type=click.Path(exists=True))
def delete(path):
    """Delete a repository directory and everything in it."""
    delete_repo(path)
    click.echo(f"deleted {path}")


@main.command()
@click.option("--local", "local_path", default=None, type=click.Path(), help="Set the default local repository.")
@click.option("--remote", "remote_spec", default=None, help="Set the default remote (user/repo or URL).")
@click.option("--option", "options", multiple=True, metavar="KEY=VALUE", help="Set a persistent option.")
def default(local_path, remote_spec, options):
    """Show or persist default repositories."""
    config = load_config()
    changed = False
    if local_path is not None:
        locate.set_local_default(local_path)  # validates
        config["defaultLocalRepo"] = str(Path(local_path).resolve())
        changed = True
    if remote_spec is not None:
        locate.set_remote_default(remote_from_spec(remote_spec))
        config["defaultRemote"] = remote_spec
        changed = True
    for item in options:
        key, sep, value = item.partition("=")
        if not sep:
            raise click.UsageError(f"--option needs KEY=VALUE, got {item!r}")
        config.setdefault("options", {})[key] = value
        changed = True
    if changed:
        save_config(config)
    click.echo(f"local:  {config.get('defaultLocalRepo') or '(unset)'}")
    click.echo(f"remote: {config.get('defaultRemote') or '(unset)'}")


@main.command()
@repo_option
@click.option("--view", type=click.Choice(["artifacts", "tags"]), default="artifacts")
@json_option
def show(repo_spec, view, as_json):
    """List artifact rows or tag rows."""
    rows = show_repo(_resolve(repo_spec), view=view)
    if view == "artifacts":
        objs = [{"md5hash": r.md5hash, "name": r.name, "createdDate": r.created_date} for r in rows]
        table_rows = [(r.md5hash, r.name, r.created_date) for r in rows]
        headers = ("md5hash", "name", "createdDate")
    else:
        objs = [{"artifact": r.artifact, "tag": r.tag, "createdDate": r.created_date} for r in rows]
        table_rows = [(r.artifact, r.tag, r.created_date) for r in rows]
        headers = ("artifact", "tag", "createdDate")
    if as_json:
        click.echo(json.dumps(objs, indent=2))
    elif rows:
        click.echo(_table(table_rows, headers))


@main.command()
@repo_option
@json_option
def summary(repo_spec, as_json):
    """Counts of artifacts, classes, and saves per day."""
    result = summarize_repo(_resolve(repo_spec))
    if as_json:
        click.echo(json.dumps(result.to_json_obj(), indent=2))
        return
    click.echo(f"Number of archived artifacts in Repository: {result.artifact_count}")
    click.echo(f"Number of archived datasets in Repository: {result.dataset_count}")
    if result.counts_by_class:
        click.echo("Number of various classes archived in Repository:")
        width = max(len(c) for c in result.counts_by_class)
        for cls, count in result.counts_by_class.items():
            click.echo(f"  {cls.ljust(width)}  {count}")
    if result.saves_per_day:
        click.echo("Saves per day in Repository:")
        for day, count in result.saves_per_day.items():
            click.echo(f"  {day}  {count}")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@repo_option
@click.option("--kind", type=click.Choice(KINDS), default=None, help="Payload kind (default: by extension).")
@click.option("--name", default=None, help="Artifact name (default: file stem).")
@click.option("--tag", "user_tags", multiple=True, metavar="KEY:VALUE", help="Extra user tags.")
@click.option("--image", type=click.Path(exists=True, dir_okay=False), default=None, help="Pre-rendered PNG for a plot spec.")
@click.option("--data/--no-data", "archive_data", default=True, help="Archive dependent data.")
@click.option("--session/--no-session", "archive_session", default=False, help="Archive a session manifest.")
def save(file, repo_spec, kind, name, user_tags, image, archive_data, archive_session):
    """Archive a file as a typed artifact."""
    for tag in user_tags:
        if ":" not in tag:
            raise click.UsageError(f"user tags need a colon: {tag!r}")
    image_bytes = Path(image).read_bytes() if image else None
    envelope = envelope_from_file(file, kind=kind, name=name, image=image_bytes)
    result = save_artifact(
        resolve_local(_resolve(repo_spec)),
        envelope,
        user_tags=user_tags,
        archive_data=archive_data,
        archive_session=archive_session,
    )
    click.echo(result.md5hash)
    if result.data_md5hash:
        click.echo(f"data: {result.data_md5hash}")


@main.command()
@click.argument("address")
@click.option("--out", type=click.Path(), default=None, help="Write blob bytes to a file.")
def read(address, out):
    """Read an artifact by address or hash prefix (aread)."""
    envelopes = aread(address)
    if out:
        if len(envelopes) > 1:
            raise _fail(f"prefix matches {len(envelopes)} artifacts; use a longer prefix")
        Path(out).write_bytes(envelopes[0].canonical_bytes())
        click.echo(f"wrote {out}")
        return
    for envelope in envelopes:
        sys.stdout.buffer.write(envelope.canonical_bytes())


@main.command()
@click.argument("hashes", nargs=-1)
@repo_option
@click.option("--from", "date_from", default=None, help="Also remove saves on/after this date (YYYY-MM-DD).")
@click.option("--to", "date_to", default=None, help="Upper bound for --from (default: today).")
@click.option("--older-than-days", type=int, default=None, help="Remove artifacts older than N days.")
@click.option("--rm-orphaned-data", is_flag=True, help="Also drop datasets left without consumers.")
def rm(hashes, repo_spec, date_from, date_to, older_than_days, rm_orphaned_data):
    """Remove artifacts by hash, or in bulk by date range."""
    repo = resolve_local(_resolve(repo_spec))
    targets = list(hashes)
    if older_than_days is not None:
        cutoff = date.today() - timedelta(days=older_than_days)
        targets += search(repo, [DateRange(date(1970, 1, 1), cutoff)])
    elif date_from:
        upper = date.fromisoformat(date_to) if date_to else date.today()
        targets += search(repo, [DateRange(date.fromisoformat(date_from), upper)])
    if not targets:
        raise click.UsageError("nothing to remove: give hashes, --from, or --older-than-days")
    result = remove_artifacts(repo, targets, remove_orphaned_data=rm_orphaned_data)
    click.echo(f"removed {result.count}")
    for skipped in result.skipped:
        click.echo(f"skipped (unknown): {skipped}", err=True)


@main.command(name="search")
@repo_option
@click.option("--tag", "tag_patterns", multiple=True, metavar="KEY:VALUE", help="Exact tag pattern (repeatable).")
@click.option("--from", "date_from", default=None, help="Match saves on/after this date (YYYY-MM-DD).")
@click.option("--to", "date_to", default=None, help="Match saves on/before this date (YYYY-MM-DD).")
@click.option("--all/--any", "intersect", default=True, help="Require all patterns, or any.")
@json_option
def search_cmd(repo_spec, tag_patterns, date_from, date_to, intersect, as_json):
    """Find artifact hashes by tag and date patterns."""
    patterns: list = list(tag_patterns)
    if date_from or date_to:
        patterns.append(DateRange.parse(date_from or "0001-01-01", date_to or "9999-12-31"))
    if not patterns:
        raise click.UsageError("give at least one --tag or a date range")
    hashes = search(_resolve(repo_spec), patterns, intersect=intersect)
    if as_json:
        click.echo(json.dumps(hashes))
    else:
        for md5hash in hashes:
            click.echo(md5hash)


@main.command()
@click.argument("hashes", nargs=-1, required=True)
@click.option("--from", "source_spec", "--source", required=True, help="Source repository locator.")
@click.option("--to", "dest_path", required=True, type=click.Path(), help="Destination local repository.")
def copy(hashes, source_spec, dest_path):
    """Copy artifacts (blobs plus all tags) into a local repository."""
    dest = resolve_local(dest_path)
    result = copy_artifacts(_resolve(source_spec), dest, hashes)
    click.echo(f"copied {result.count}")
    for missing in result.missing:
        click.echo(f"missing at source: {missing}", err=True)


@main.command(name="zip")
@repo_option
@click.option("--out", required=True, type=click.Path(), help="Zip archive to write.")
def zip_cmd(repo_spec, out):
    """Bundle a repository (local or remote) into a zip archive."""
    zip_repo(_resolve(repo_spec), out)
    click.echo(f"wrote {out}")


@main.command()
@repo_option
@click.option("--out", required=True, type=click.Path(), help="Markdown file to write.")
@click.option("--miniatures/--no-miniatures", "add_miniature", default=True)
@click.option("--tags/--no-tags", "add_tags", default=True)
def gallery(repo_spec, out, add_miniature, add_tags):
    """Write a markdown gallery with one section per artifact."""
    create_md_gallery(_resolve(repo_spec), out, add_miniature=add_miniature, add_tags=add_tags)
    click.echo(f"wrote {out}")


@main.command()
@click.argument("md5hash")
@repo_option
def hook(md5hash, repo_spec):
    """Print the one-line retrieval hook for an artifact."""
    result = render_hook(_resolve(repo_spec), md5hash)
    click.echo(result.command)
    if result.url:
        click.echo(result.url)


@main.command(name="history")
@click.argument("md5hash")
@repo_option
@json_option
def history_cmd(md5hash, repo_spec, as_json):
    """Show the chain of calls that produced an artifact."""
    pedigree = history(_resolve(repo_spec), md5hash)
    if as_json:
        click.echo(json.dumps(pedigree.to_json_obj()))
    else:
        click.echo(pedigree.render())


@main.command()
@click.argument("md5hash")
@repo_option
@json_option
def session(md5hash, repo_spec, as_json):
    """Show the session manifest recorded with an artifact."""
    manifest = get_session(_resolve(repo_spec), md5hash)
    if as_json:
        click.echo(json.dumps(manifest.to_json_obj(), indent=2))
        return
    click.echo(f"tool: {manifest.tool_name} {manifest.tool_version}")
    click.echo(f"platform: {manifest.platform}")
    if manifest.components:
        click.echo("components:")
        width = max(len(c.name) for c in manifest.components)
        for component in manifest.components:
            line = f"  {component.name.ljust(width)}  {component.version}"
            if component.source:
                line += f"  {component.source}"
            click.echo(line)


@main.command()
@click.argument("md5hash")
@repo_option
@click.option("--out", required=True, type=click.Path(), help="Lockfile to write.")
def lockfile(md5hash, repo_spec, out):
    """Emit a name==version lockfile from an artifact's session manifest."""
    manifest = get_session(_resolve(repo_spec), md5hash)
    emit_lockfile(manifest, out)
    click.echo(f"wrote {out}")


@main.command()
@repo_option
@json_option
def check(repo_spec, as_json):
    """Cross-check gallery files against the index."""
    report = check_integrity(resolve_local(_resolve(repo_spec)))
    if as_json:
        click.echo(json.dumps(report.to_json_obj(), indent=2))
    elif report.is_clean:
        click.echo("repository consistent")
    else:
        for name in report.orphan_files:
            click.echo(f"orphan gallery file: {name}")
        for md5hash, filename in report.dangling_blobs:
            click.echo(f"missing blob: {filename}")
        for record in report.orphan_tags:
            click.echo(f"tag for absent artifact: {record.artifact} {record.tag}")
        for record in report.malformed_tags:
            click.echo(f"malformed tag: {record.artifact} {record.tag!r}")
    if not report.is_clean:
        sys.exit(1)


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@repo_option
@click.option("--rule", "rules", multiple=True, metavar="GLOB=KIND", help="Archive files matching GLOB as KIND.")
@click.option("--interval", type=float, default=1.0, show_default=True)
@click.option("--once", is_flag=True, help="Scan once and exit.")
def watch(directory, repo_spec, rules, interval, once):
    """Archive every new or changed file dropped into a directory."""
    repo = resolve_local(_resolve(repo_spec))
    rule_map = dict(DEFAULT_RULES)
    if rules:
        rule_map = {}
        for item in rules:
            pattern, sep, kind = item.partition("=")
            if not sep or kind not in KINDS:
                raise click.UsageError(f"--rule needs GLOB=KIND with a known kind: {item!r}")
            rule_map[pattern] = kind
    if once:
        for md5hash in scan_once(repo, directory, rule_map):
            click.echo(md5hash)
        return
    click.echo(f"watching {directory} (Ctrl-C to stop)")
    try:
        watch_loop(repo, directory, rule_map, interval=interval)
    except KeyboardInterrupt:
        pass


@main.command()
@repo_option
@click.option("--bind", default="127.0.0.1:8973", show_default=True, metavar="HOST:PORT")
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None, help="Static web UI bundle to serve.")
def serve(repo_spec, bind, ui_dir):
    """Serve the read-only JSON API and the web UI."""
    from .server import serve as run_server

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.UsageError(f"--bind needs HOST:PORT, got {bind!r}")
    try:
        run_server(_resolve(repo_spec), host=host, port=int(port_text), ui_dir=ui_dir)
    except OSError as exc:
        raise _fail(f"cannot bind {bind}: {exc}")


if __name__ == "__main__":
    run()
