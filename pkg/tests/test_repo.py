"""Repository lifecycle, defaults, show/summary, integrity checking."""

import os
import sqlite3

import pytest

from arcvault import (
    Busy,
    NoDefaultRepo,
    NotARepo,
    RepoConflict,
    check_integrity,
    create_repo,
    delete_repo,
    open_repo,
    save_artifact,
    set_default_repo,
    show_repo,
    summarize_repo,
)
from arcvault.repo import Repository

from conftest import generic_envelope, iris_dataset, model_envelope, plot_envelope


def test_create_repo_layout(tmp_path):
    repo = create_repo(tmp_path / "arepo")
    assert (tmp_path / "arepo" / "backpack.db").is_file()
    assert (tmp_path / "arepo" / "gallery").is_dir()
    assert summarize_repo(repo).artifact_count == 0


def test_create_twice_is_noop(tmp_path):
    first = create_repo(tmp_path / "arepo")
    save_artifact(first, generic_envelope())
    second = create_repo(tmp_path / "arepo")
    assert second.root == first.root
    assert summarize_repo(second).artifact_count == 1


def test_create_conflicts(tmp_path):
    stray = tmp_path / "stray"
    stray.mkdir()
    (stray / "gallery").write_text("not a directory")
    with pytest.raises(RepoConflict):
        create_repo(stray)

    occupied = tmp_path / "occupied"
    occupied.mkdir()
    (occupied / "notes.txt").write_text("hello")
    with pytest.raises(RepoConflict):
        create_repo(occupied)

    bad_index = tmp_path / "bad"
    bad_index.mkdir()
    (bad_index / "backpack.db").write_text("not sqlite")
    with pytest.raises(RepoConflict):
        create_repo(bad_index)


def test_create_as_default(tmp_path):
    repo = create_repo(tmp_path / "arepo", default=True)
    result = save_artifact(None, generic_envelope())  # locator-less save
    assert repo.has_artifact(result.md5hash)


def test_delete_repo(tmp_path):
    repo = create_repo(tmp_path / "arepo")
    for envelope in (iris_dataset(), model_envelope(), generic_envelope()):
        save_artifact(repo, envelope)
    delete_repo(repo.root)
    assert not (tmp_path / "arepo").exists()


def test_delete_refuses_non_repo(tmp_path):
    target = tmp_path / "precious"
    target.mkdir()
    (target / "data.txt").write_text("keep me")
    with pytest.raises(NotARepo):
        delete_repo(target)
    assert (target / "data.txt").exists()


def test_no_default_raises(tmp_path):
    with pytest.raises(NoDefaultRepo):
        show_repo(None)


def test_set_default_missing_path(tmp_path):
    with pytest.raises(NotARepo):
        set_default_repo(tmp_path / "nowhere")


def test_env_var_default(tmp_path, monkeypatch):
    repo = create_repo(tmp_path / "arepo")
    save_artifact(repo, generic_envelope())
    monkeypatch.setenv("ARCVAULT_REPO", str(repo.root))
    assert summarize_repo(None).artifact_count == 1


def test_show_views(repo):
    save_artifact(repo, plot_envelope(), clock="2016-02-09 14:37:06")
    tags = show_repo(repo, view="tags")
    texts = [t.tag for t in tags]
    assert any(t.startswith("format:") for t in texts)
    assert any(t.startswith("class:") for t in texts)
    assert any(t.startswith("date:") for t in texts)
    assert all(t.created_date == "2016-02-09 14:37:06" for t in tags)

    save_artifact(repo, iris_dataset())
    rows = show_repo(repo, view="artifacts")
    assert len({r.md5hash for r in rows}) == 2

    with pytest.raises(ValueError):
        show_repo(repo, view="everything")


def test_show_empty(repo):
    assert show_repo(repo, view="tags") == []
    assert show_repo(repo, view="artifacts") == []


def test_tags_share_save_timestamp(repo):
    result = save_artifact(repo, iris_dataset(), clock="2020-05-01 01:02:03")
    rows = [r for r in show_repo(repo, "artifacts") if r.md5hash == result.md5hash]
    tags = repo.tags_for(result.md5hash)
    assert {r.created_date for r in rows} == {"2020-05-01 01:02:03"}
    assert {t.created_date for t in tags} == {"2020-05-01 01:02:03"}


def test_summary_counts(repo):
    save_artifact(repo, iris_dataset(), clock="2016-02-07 10:00:00")
    save_artifact(repo, model_envelope(), clock="2016-02-07 11:00:00")
    save_artifact(repo, model_envelope(name="other", formula="y ~ 1"), clock="2016-02-07 12:00:00")
    save_artifact(repo, plot_envelope(), clock="2016-02-08 09:00:00")
    save_artifact(repo, generic_envelope(), clock="2016-02-08 10:00:00")
    summary = summarize_repo(repo)
    assert summary.artifact_count == 5
    assert summary.dataset_count == 1
    assert summary.counts_by_class == {
        "dataset": 1,
        "linear-model": 2,
        "plot-spec": 1,
        "generic": 1,
    }
    assert summary.saves_per_day == {"2016-02-07": 3, "2016-02-08": 2}


def test_summary_counts_saves_not_artifacts(repo):
    envelope = generic_envelope()
    save_artifact(repo, envelope, clock="2016-02-07 10:00:00")
    save_artifact(repo, envelope, clock="2016-02-08 10:00:00")
    summary = summarize_repo(repo)
    assert summary.artifact_count == 1
    assert summary.saves_per_day == {"2016-02-07": 1, "2016-02-08": 1}


def summarize_by_brute_force(reader):
    """Independent oracle: group-by over the full tag listing."""
    tags = reader.tag_rows()
    hashes = {row.md5hash for row in reader.artifact_rows()}
    by_class = {}
    saves = {}
    for record in tags:
        key, _, value = record.tag.partition(":")
        if key == "class":
            by_class.setdefault(value, set()).add(record.artifact)
        if key == "date":
            saves[value[:10]] = saves.get(value[:10], 0) + 1
    return {
        "artifactCount": len(hashes),
        "datasetCount": len(by_class.get("dataset", set())),
        "countsByClass": {k: len(v) for k, v in by_class.items()},
        "savesPerDay": dict(sorted(saves.items())),
    }


def test_summary_matches_brute_force(repo):
    import random

    from conftest import random_envelope

    rng = random.Random(20160209)
    for _ in range(25):
        save_artifact(
            repo,
            random_envelope(rng),
            clock=f"2016-02-{rng.randint(1, 28):02d} 12:00:00",
            user_tags=[f"experiment:{rng.randrange(3)}"],
        )
    assert summarize_repo(repo).to_json_obj() == summarize_by_brute_force(repo)


def test_integrity_clean_after_saves(repo):
    for envelope in (iris_dataset(), model_envelope(), plot_envelope(image=b"\x89PNG")):
        save_artifact(repo, envelope)
    assert check_integrity(repo).is_clean


def test_integrity_flags_missing_blob(repo):
    result = save_artifact(repo, iris_dataset())
    (repo.gallery / f"{result.md5hash}.csv").unlink()
    report = check_integrity(repo)
    assert not report.is_clean
    assert (result.md5hash, f"{result.md5hash}.csv") in report.dangling_blobs


def test_integrity_flags_orphan_file(repo):
    orphan = "0" * 32 + ".bin"
    (repo.gallery / orphan).write_bytes(b"stray")
    report = check_integrity(repo)
    assert orphan in report.orphan_files


def test_integrity_flags_orphan_and_malformed_tags(repo):
    result = save_artifact(repo, generic_envelope())
    conn = sqlite3.connect(repo.db_path)
    conn.execute(
        "INSERT INTO tag (artifact, tag, createdDate) VALUES (?, ?, ?)",
        ("f" * 32, "class:ghost", "2016-01-01 00:00:00"),
    )
    conn.execute(
        "INSERT INTO tag (artifact, tag, createdDate) VALUES (?, ?, ?)",
        (result.md5hash, "no-colon-here", "2016-01-01 00:00:00"),
    )
    conn.commit()
    conn.close()
    report = check_integrity(repo)
    assert any(t.artifact == "f" * 32 for t in report.orphan_tags)
    assert any(t.tag == "no-colon-here" for t in report.malformed_tags)


def test_create_then_delete_leaves_nothing(tmp_path):
    before = set(os.listdir(tmp_path))
    create_repo(tmp_path / "scratch")
    delete_repo(tmp_path / "scratch")
    assert set(os.listdir(tmp_path)) == before


def test_writer_lock_excludes_second_writer(repo):
    with repo.write_lock():
        with pytest.raises(Busy):
            with Repository(repo.root).write_lock(timeout=0.2):
                pass


def test_open_repo_missing(tmp_path):
    with pytest.raises(NotARepo):
        open_repo(tmp_path / "nope")
