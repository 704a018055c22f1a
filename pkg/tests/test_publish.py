"""Hook rendering and the markdown gallery."""

import shutil

import pytest

from arcvault import (
    NotFound,
    aread,
    create_md_gallery,
    fetch_remote_index,
    load_artifact,
    parse_address,
    render_hook,
    save_artifact,
    set_local_default,
    url_remote,
)

from conftest import generic_envelope, iris_dataset, model_envelope, plot_envelope


def test_local_hook_bare_hash(repo):
    md5hash = save_artifact(repo, iris_dataset()).md5hash
    hook = render_hook(repo, md5hash)
    assert hook.address == md5hash
    assert hook.command == f"arcvault read {md5hash}"
    assert hook.url is None


def test_hook_unknown_hash(repo):
    with pytest.raises(NotFound):
        render_hook(repo, "a" * 32)


def test_hook_roundtrip_through_aread(repo):
    md5hash = save_artifact(repo, model_envelope()).md5hash
    hook = render_hook(repo, md5hash)
    set_local_default(repo)
    loaded = aread(parse_address(hook.address).render())
    assert len(loaded) == 1
    assert loaded[0].content_hash() == md5hash


def test_remote_hook_includes_segments_and_url(repo, static_server):
    md5hash = save_artifact(repo, plot_envelope()).md5hash
    shutil.copyfile(repo.db_path, static_server.directory / "backpack.db")
    shutil.copytree(repo.gallery, static_server.directory / "gallery")
    remote = fetch_remote_index(url_remote(static_server.base_url))
    hook = render_hook(remote, md5hash)
    assert hook.address == f"{static_server.base_url}/{md5hash}"
    assert hook.url == f"{static_server.base_url}/gallery/{md5hash}.json"
    address = parse_address(hook.address)
    assert address.url_base == static_server.base_url
    assert address.hash_prefix == md5hash


def test_gallery_sections_one_per_artifact(repo, tmp_path):
    hashes = [
        save_artifact(repo, iris_dataset(), clock="2016-02-07 10:00:00").md5hash,
        save_artifact(repo, model_envelope(), clock="2016-02-08 10:00:00").md5hash,
        save_artifact(repo, plot_envelope(), clock="2016-02-09 10:00:00").md5hash,
    ]
    out = tmp_path / "gallery.md"
    create_md_gallery(repo, out, add_miniature=True, add_tags=True)
    text = out.read_text(encoding="utf-8")
    sections = [line for line in text.splitlines() if line.startswith("## ")]
    assert len(sections) == 3
    # newest first
    assert sections[0] == f"## {hashes[2]}"
    assert sections[-1] == f"## {hashes[0]}"
    assert "- `class:dataset`" in text
    assert "```" in text  # txt miniature fenced


def test_gallery_empty_repo_title_only(repo, tmp_path):
    out = tmp_path / "empty.md"
    create_md_gallery(repo, out)
    assert out.read_text(encoding="utf-8") == "# Artifact gallery\n"


def test_gallery_flags_off_hash_and_hook_only(repo, tmp_path):
    md5hash = save_artifact(repo, iris_dataset()).md5hash
    out = tmp_path / "bare.md"
    create_md_gallery(repo, out, add_miniature=False, add_tags=False)
    text = out.read_text(encoding="utf-8")
    assert f"## {md5hash}" in text
    assert f"`arcvault read {md5hash}`" in text
    assert "```" not in text
    assert "- `" not in text


def test_gallery_dedupes_resaves(repo, tmp_path):
    envelope = generic_envelope()
    save_artifact(repo, envelope, clock="2016-02-07 10:00:00")
    save_artifact(repo, envelope, clock="2016-02-08 10:00:00")
    out = tmp_path / "dedup.md"
    create_md_gallery(repo, out)
    text = out.read_text(encoding="utf-8")
    assert text.count("## ") == 1


def test_gallery_png_miniature_link(repo, tmp_path):
    md5hash = save_artifact(repo, plot_envelope(image=b"\x89PNGdata")).md5hash
    out = tmp_path / "plots.md"
    create_md_gallery(repo, out)
    text = out.read_text(encoding="utf-8")
    assert f"{md5hash}.png" in text
    assert "![miniature" in text


def test_gallery_hooks_executable(repo, tmp_path):
    for envelope in (iris_dataset(), model_envelope(), generic_envelope()):
        save_artifact(repo, envelope)
    out = tmp_path / "hooks.md"
    create_md_gallery(repo, out)
    set_local_default(repo)
    for line in out.read_text(encoding="utf-8").splitlines():
        if line.startswith("`arcvault read "):
            address = line.strip("`").removeprefix("arcvault read ")
            assert len(load_artifact(repo, parse_address(address).hash_prefix)) == 1
