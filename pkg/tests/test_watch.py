"""Directory-watch auto-archiver."""

import json
import os

from arcvault import search, summarize_repo
from arcvault.watch import scan_once


def test_watch_archives_model_json(repo, tmp_path):
    drop = tmp_path / "drop"
    drop.mkdir()
    (drop / "model.json").write_text(
        json.dumps(
            {
                "formula": "y ~ x",
                "coefficients": {"(Intercept)": 1.0, "x": 2.0},
                "rank": 2,
                "dfResidual": 10,
            }
        )
    )
    saved = scan_once(repo, drop, {"*.json": "linear-model"})
    assert len(saved) == 1
    assert search(repo, ["coefname:x"]) == saved
    assert search(repo, ["source:watch"]) == saved


def test_watch_dedupes_identical_content(repo, tmp_path):
    drop = tmp_path / "drop"
    drop.mkdir()
    target = drop / "data.csv"
    target.write_text("a,b\n1,2\n")
    state = {}
    first = scan_once(repo, drop, state=state)
    # re-drop identical bytes with a fresh mtime
    os.utime(target, (1e9, 1e9))
    second = scan_once(repo, drop, state=state)
    assert first == second
    blobs = [p for p in repo.gallery.iterdir() if p.suffix == ".csv"]
    assert len(blobs) == 1
    dates = [t for t in repo.tags_for(first[0]) if t.tag.startswith("date:")]
    assert len(dates) == 2


def test_watch_unchanged_file_skipped(repo, tmp_path):
    drop = tmp_path / "drop"
    drop.mkdir()
    (drop / "data.csv").write_text("a\n1\n")
    state = {}
    assert len(scan_once(repo, drop, state=state)) == 1
    assert scan_once(repo, drop, state=state) == []


def test_watch_ignores_unmatched_extension(repo, tmp_path):
    drop = tmp_path / "drop"
    drop.mkdir()
    (drop / "notes.md").write_text("# hello")
    assert scan_once(repo, drop, {"*.csv": "dataset"}) == []
    assert summarize_repo(repo).artifact_count == 0


def test_watch_skips_unparseable_file(repo, tmp_path, caplog):
    drop = tmp_path / "drop"
    drop.mkdir()
    (drop / "broken.csv").write_bytes(b"\xff\xfe not,utf8 csv \xff")
    (drop / "good.csv").write_text("x\n5\n")
    saved = scan_once(repo, drop, {"*.csv": "dataset"})
    assert len(saved) == 1


def test_watch_changed_content_new_artifact(repo, tmp_path):
    drop = tmp_path / "drop"
    drop.mkdir()
    target = drop / "data.csv"
    state = {}
    target.write_text("a\n1\n")
    first = scan_once(repo, drop, state=state)
    target.write_text("a\n2\n")
    second = scan_once(repo, drop, state=state)
    assert first != second
    assert summarize_repo(repo).artifact_count == 2
