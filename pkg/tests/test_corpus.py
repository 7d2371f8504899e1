import json

import pytest

from bitspectra import corpus
from bitspectra.metrics import shannon_entropy_bytes


def read(base, entry):
    return (base / entry.path).read_bytes()


# --- random group -----------------------------------------------------------

def test_gen_random_deterministic(tmp_path):
    a = corpus.gen_random(tmp_path / "a", 1, (16, 16), seed=7)
    b = corpus.gen_random(tmp_path / "b", 1, (16, 16), seed=7)
    assert read(tmp_path / "a", a[0]) == read(tmp_path / "b", b[0])
    assert a[0].seed == b[0].seed


def test_gen_random_entropy_and_sizes(tmp_path):
    entries = corpus.gen_random(tmp_path, 6, (65536, 131072), seed=3)
    assert len(entries) == 6
    for e in entries:
        data = read(tmp_path, e)
        assert len(data) == e.size_bytes
        assert 65536 <= e.size_bytes <= 131072
        assert e.group == "random"
        assert shannon_entropy_bytes(data) >= 7.9


def test_gen_random_os_random_flag(tmp_path):
    entries = corpus.gen_random(tmp_path, 2, (64, 64), seed=1, use_os_random=True)
    assert all(e.generator == "os-random" for e in entries)


# --- structured group ---------------------------------------------------------

def test_tabular_base_case_is_header_plus_one_row():
    header = "id,name,category,value,flag\n"
    data = corpus.TEMPLATES["tabular"](seed=5, size=len(header) + 1).decode("ascii")
    lines = data.splitlines()
    assert lines[0] == header.strip()
    assert len(lines) == 2
    assert lines[1].count(",") == 4


def test_records_template_low_entropy():
    for size in (4096, 65536):
        data = corpus.TEMPLATES["records"](seed=11, size=size)
        assert shannon_entropy_bytes(data) < 6.0
        assert len(data) % 80 == 0


def test_structured_entropy_below_seven(tmp_path):
    for template in corpus.TEMPLATES:
        entries = corpus.gen_structured(tmp_path, 2, (8192, 32768), seed=2,
                                        template=template)
        for e in entries:
            assert shannon_entropy_bytes(read(tmp_path, e)) < 7.0
            assert e.group == "structured"


def test_gen_structured_rejects_unknown_template(tmp_path):
    with pytest.raises(ValueError):
        corpus.gen_structured(tmp_path, 1, (64, 64), seed=0, template="xml")


# --- compressed group -----------------------------------------------------

def test_highly_repetitive_input_compresses_below_ten_percent(tmp_path):
    line = b"2026-01-01T00:00:00 service=api status=200 bytes=512 path=/health\n"
    data = line * (1024 * 1024 // len(line))
    (tmp_path / "rep.log").write_bytes(data)
    src = corpus.ManifestEntry(path="rep.log", group="structured",
                               size_bytes=len(data), generator="external", seed=0)
    entries = corpus.gen_compressed(tmp_path, [src], seed=9)
    gz = next(e for e in entries if e.generator == "gzip")
    assert gz.size_bytes < 0.10 * len(data)


def test_gen_compressed_outputs_and_linkage(tmp_path):
    src = corpus.gen_structured(tmp_path, 1, (32768, 32768), seed=4, template="prose")
    entries = corpus.gen_compressed(tmp_path, src, seed=9, slices_per_output=1)
    by_gen = {e.generator: e for e in entries}
    assert set(by_gen) == {"gzip", "bzip2", "slice"}
    assert all(e.group == "compressed" for e in entries)

    gz = read(tmp_path, by_gen["gzip"])
    assert gz[:2] == b"\x1f\x8b"  # RFC 1952 magic
    bz = read(tmp_path, by_gen["bzip2"])
    assert bz[:3] == b"BZh"
    assert by_gen["gzip"].parent == src[0].path

    slices = [e for e in entries if e.generator == "slice"]
    for s in slices:
        parent = read(tmp_path, by_gen[s.parent.endswith(".gz") and "gzip" or "bzip2"])
        off, ln = s.params["offset"], s.params["length"]
        assert read(tmp_path, s) == parent[off : off + ln]


def test_gen_compressed_slice_determinism(tmp_path):
    src_a = corpus.gen_structured(tmp_path / "a", 1, (16384, 16384), seed=4, template="tabular")
    src_b = corpus.gen_structured(tmp_path / "b", 1, (16384, 16384), seed=4, template="tabular")
    ea = corpus.gen_compressed(tmp_path / "a", src_a, seed=21)
    eb = corpus.gen_compressed(tmp_path / "b", src_b, seed=21)
    for x, y in zip(ea, eb):
        assert x.params == y.params
        assert read(tmp_path / "a", x) == read(tmp_path / "b", y)


def test_compressed_body_entropy(tmp_path):
    src = corpus.gen_structured(tmp_path, 1, (262144, 262144), seed=6, template="prose")
    entries = corpus.gen_compressed(tmp_path, src, seed=2)
    for e in entries:
        assert shannon_entropy_bytes(read(tmp_path, e)) >= 7.5


# --- manifest and verification -----------------------------------------------

def test_manifest_jsonl_exact_fields(tmp_path):
    manifest = corpus.generate_corpus(tmp_path, seed=31, files_per_group=3,
                                      size_range=(2048, 8192))
    lines = (tmp_path / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == len(manifest.entries)
    for line in lines:
        assert list(json.loads(line)) == list(corpus.MANIFEST_FIELDS)
    loaded = corpus.CorpusManifest.load(tmp_path / "manifest.jsonl")
    assert loaded.entries == manifest.entries


def test_verify_fresh_corpus_all_ok(tmp_path):
    corpus.generate_corpus(tmp_path, seed=17, files_per_group=3, size_range=(2048, 8192))
    manifest = corpus.CorpusManifest.load(tmp_path / "manifest.jsonl")
    report = corpus.verify(manifest, tmp_path)
    assert report.all_ok
    assert all(r.status == "ok" for r in report.results)


def test_verify_detects_single_tampered_file(tmp_path):
    manifest = corpus.generate_corpus(tmp_path, seed=17, files_per_group=3,
                                      size_range=(2048, 8192))
    victim = manifest.entries[4]
    target = tmp_path / victim.path
    target.write_bytes(target.read_bytes()[:-1])
    report = corpus.verify(manifest, tmp_path)
    bad = [r for r in report.results if r.status != "ok"]
    assert [r.path for r in bad] == [victim.path]
    assert not report.all_ok


def test_verify_missing_file_is_failure_not_crash(tmp_path):
    manifest = corpus.generate_corpus(tmp_path, seed=23, files_per_group=3,
                                      size_range=(2048, 8192))
    (tmp_path / manifest.entries[0].path).unlink()
    report = corpus.verify(manifest, tmp_path)
    assert report.results[0].status == "missing"
    assert not report.all_ok


def test_verify_unknown_generator_reported_unverifiable(tmp_path):
    (tmp_path / "mystery.bin").write_bytes(b"\x01\x02\x03\x04")
    entry = corpus.ManifestEntry(path="mystery.bin", group="random", size_bytes=4,
                                 generator="quantum", seed=0)
    report = corpus.verify(corpus.CorpusManifest(entries=[entry]), tmp_path)
    assert report.results[0].status == "unverifiable"
    assert report.all_ok  # unverifiable is not a failure


def test_full_corpus_regeneration_bit_exact(tmp_path):
    m1 = corpus.generate_corpus(tmp_path / "one", seed=77, files_per_group=3,
                                size_range=(2048, 8192))
    m2 = corpus.generate_corpus(tmp_path / "two", seed=77, files_per_group=3,
                                size_range=(2048, 8192))
    assert [e.to_json() for e in m1.entries] == [e.to_json() for e in m2.entries]
    for e in m1.entries:
        assert read(tmp_path / "one", e) == read(tmp_path / "two", e)
