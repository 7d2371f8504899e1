"""Labeled corpus generation with full seed-based reproducibility.

Three groups mirror the classification targets: structured text-like
files, compressed versions (and random slices) of them, and
counter-based CSPRNG random files. Every entry in the manifest can be
regenerated bit-exactly from its (generator, seed, params) triple; the
manifest is JSON-lines, one entry per line.
"""

from __future__ import annotations

import bz2
import gzip
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

GZIP_LEVEL = 6
BZIP2_LEVEL = 9

MANIFEST_FIELDS = ("path", "group", "size_bytes", "generator", "seed", "parent", "params")


@dataclass(frozen=True)
class ManifestEntry:
    path: str  # relative to the manifest directory
    group: str
    size_bytes: int
    generator: str
    seed: int
    parent: str | None = None
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {name: getattr(self, name) for name in MANIFEST_FIELDS}
        return json.dumps(doc, sort_keys=False)

    @classmethod
    def from_json(cls, line: str) -> "ManifestEntry":
        doc = json.loads(line)
        return cls(**{name: doc[name] for name in MANIFEST_FIELDS})


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry]
    corpus_seed: int | None = None

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for entry in self.entries:
                fh.write(entry.to_json() + "\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CorpusManifest":
        entries = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(ManifestEntry.from_json(line))
        return cls(entries=entries, corpus_seed=None)


def derive_seed(corpus_seed: int, *parts) -> int:
    """Stable 64-bit sub-seed from the corpus seed and a label path."""
    text = "|".join([str(corpus_seed), *map(str, parts)])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def keystream(seed: int, n: int) -> bytes:
    """n bytes of a ChaCha20 keystream keyed from the seed; counter-based
    and reproducible, standing in for /dev/random output."""
    key = hashlib.sha256(b"bitspectra-random|" + seed.to_bytes(8, "big", signed=False)).digest()
    enc = Cipher(algorithms.ChaCha20(key, b"\x00" * 16), mode=None).encryptor()
    return enc.update(b"\x00" * n)


# Generated sizes snap to byte counts whose bit length factors into primes
# <= 7 (mantissa 8..15 without 11 and 13, times a power of two). The grid is
# still log-uniform at ~6 points per octave, and it keeps the FFT kernel off
# its slow large-prime code path for every generated file.
_SMOOTH_MANTISSAS = (8, 9, 10, 12, 14, 15)


def _smooth_candidates(lo: int, hi: int) -> list[int]:
    out = list(range(max(lo, 1), min(hi, 7) + 1))
    e = 0
    while (8 << e) <= hi:
        out.extend(m << e for m in _SMOOTH_MANTISSAS if lo <= (m << e) <= hi)
        e += 1
    return out


def _round_size_smooth(n: int, lo: int, hi: int) -> int:
    candidates = _smooth_candidates(lo, hi)
    if not candidates:
        return max(lo, min(hi, n))
    return min(candidates, key=lambda c: (abs(c - n), c))


def _log_uniform_sizes(rng: np.random.Generator, count: int, lo: int, hi: int) -> list[int]:
    if not 1 <= lo <= hi:
        raise ValueError(f"size range must satisfy 1 <= min ({lo}) <= max ({hi})")
    draws = np.exp(rng.uniform(np.log(lo), np.log(hi), size=count))
    return [_round_size_smooth(int(round(x)), lo, hi) for x in draws]


# --- structured templates -------------------------------------------------

_VOCAB = (
    "the quick brown fox jumps over lazy dog while seven wizards brew strong "
    "potions under ancient oak trees near silver river bright moon rises above "
    "quiet village where children play long games during summer evenings and "
    "old stories travel far beyond tall mountains carrying gentle songs about "
    "harvest rain winter roads market bread copper lanterns paper letters"
).split()

_CATEGORIES = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")


# Templates emit whole units (sentences, rows, records) until the target
# size is reached, never truncating mid-unit. Regenerating with the emitted
# length as the target reproduces the same bytes, which is what lets the
# manifest record actual sizes.


def _template_prose(seed: int, size: int) -> bytes:
    rng = np.random.default_rng(seed)
    parts: list[str] = []
    n = 0
    while n < size:
        k = int(rng.integers(6, 15))
        idx = rng.integers(0, len(_VOCAB), size=k)
        sentence = " ".join(_VOCAB[i] for i in idx).capitalize() + ". "
        parts.append(sentence)
        n += len(sentence)
    return "".join(parts).encode("ascii")


def _template_tabular(seed: int, size: int) -> bytes:
    rng = np.random.default_rng(seed)
    parts = ["id,name,category,value,flag\n"]
    n = len(parts[0])
    i = 0
    while n < size:
        row = (
            f"{i:08d},{_VOCAB[int(rng.integers(0, len(_VOCAB)))]},"
            f"{_CATEGORIES[int(rng.integers(0, len(_CATEGORIES)))]},"
            f"{rng.uniform(0.0, 1000.0):012.4f},{int(rng.integers(0, 2))}\n"
        )
        parts.append(row)
        n += len(row)
        i += 1
    return "".join(parts).encode("ascii")


def _template_records(seed: int, size: int) -> bytes:
    # Fixed-width 80-byte records, zero padded; position-based layout.
    rng = np.random.default_rng(seed)
    parts: list[bytes] = []
    n = 0
    i = 0
    while n < size:
        name = _VOCAB[int(rng.integers(0, len(_VOCAB)))][:12]
        rec = (
            f"{i:010d}".encode("ascii")
            + name.encode("ascii").ljust(16, b"\x00")
            + f"{int(rng.integers(0, 1_000_000)):020d}".encode("ascii")
            + b"\x00" * 34
        )
        parts.append(rec)
        n += len(rec)
        i += 1
    return b"".join(parts)


TEMPLATES: dict[str, Callable[[int, int], bytes]] = {
    "tabular": _template_tabular,
    "prose": _template_prose,
    "records": _template_records,
}


# --- generators -----------------------------------------------------------


def _write(out_dir: Path, rel: str, data: bytes) -> None:
    target = out_dir / rel
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(data)


def gen_random(
    out_dir: str | os.PathLike,
    count: int,
    size_range: tuple[int, int],
    seed: int,
    use_os_random: bool = False,
    prefix: str = "random",
) -> list[ManifestEntry]:
    """Seeded random files, sizes log-uniform in the byte range."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    sizes = _log_uniform_sizes(
        np.random.default_rng(derive_seed(seed, prefix, "sizes")), count, *size_range
    )
    entries = []
    for i, size in enumerate(sizes):
        file_seed = derive_seed(seed, prefix, i)
        if use_os_random:
            data, generator = os.urandom(size), "os-random"
        else:
            data, generator = keystream(file_seed, size), "random"
        rel = f"{prefix}_{i:04d}.bin"
        _write(out, rel, data)
        entries.append(
            ManifestEntry(
                path=rel,
                group="random",
                size_bytes=size,
                generator=generator,
                seed=file_seed,
            )
        )
    return entries


def gen_structured(
    out_dir: str | os.PathLike,
    count: int,
    size_range: tuple[int, int],
    seed: int,
    template: str = "tabular",
    prefix: str | None = None,
) -> list[ManifestEntry]:
    """Deterministic low-entropy files from one of the named templates."""
    if template not in TEMPLATES:
        raise ValueError(f"unknown template {template!r}, expected one of {sorted(TEMPLATES)}")
    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    prefix = prefix or f"structured_{template}"
    sizes = _log_uniform_sizes(
        np.random.default_rng(derive_seed(seed, prefix, "sizes")), count, *size_range
    )
    suffix = {"tabular": "csv", "prose": "txt", "records": "dat"}[template]
    entries = []
    for i, size in enumerate(sizes):
        file_seed = derive_seed(seed, prefix, i)
        data = TEMPLATES[template](file_seed, size)
        rel = f"{prefix}_{i:04d}.{suffix}"
        _write(out, rel, data)
        entries.append(
            ManifestEntry(
                path=rel,
                group="structured",
                size_bytes=len(data),
                generator=f"template-{template}",
                seed=file_seed,
            )
        )
    return entries


def gen_compressed(
    out_dir: str | os.PathLike,
    inputs: Sequence[ManifestEntry],
    seed: int,
    slice_fraction: tuple[float, float] = (0.25, 0.75),
    slices_per_output: int = 1,
    codecs: Sequence[str] = ("gzip", "bzip2"),
) -> list[ManifestEntry]:
    """Compress each input with gzip and bzip2 exactly as stored on disk,
    then cut seeded byte-aligned slices out of each compressed stream.

    Whole files keep their container headers; a slice includes whatever
    falls inside its offset window. Everything is labeled compressed.
    """
    if not inputs:
        raise ValueError("gen_compressed needs at least one input entry")
    for codec in codecs:
        if codec not in ("gzip", "bzip2"):
            raise ValueError(f"unknown codec {codec!r}")
    out = Path(out_dir)
    entries = []
    for entry in inputs:
        data = (out / entry.path).read_bytes()
        for codec in codecs:
            if codec == "gzip":
                blob = gzip.compress(data, GZIP_LEVEL, mtime=0)
                rel = entry.path + ".gz"
                params = {"level": GZIP_LEVEL}
            else:
                blob = bz2.compress(data, BZIP2_LEVEL)
                rel = entry.path + ".bz2"
                params = {"level": BZIP2_LEVEL}
            _write(out, rel, blob)
            comp_entry = ManifestEntry(
                path=rel,
                group="compressed",
                size_bytes=len(blob),
                generator=codec,
                seed=derive_seed(seed, codec, entry.path),
                parent=entry.path,
                params=params,
            )
            entries.append(comp_entry)

            lo = max(1, int(slice_fraction[0] * len(blob)))
            hi = max(lo, int(slice_fraction[1] * len(blob)))
            for j in range(slices_per_output):
                slice_seed = derive_seed(seed, "slice", rel, j)
                rng = np.random.default_rng(slice_seed)
                length = _round_size_smooth(int(rng.integers(lo, hi + 1)), lo, hi)
                offset = int(rng.integers(0, len(blob) - length + 1))
                srel = f"{rel}.slice{j}.bin"
                _write(out, srel, blob[offset : offset + length])
                entries.append(
                    ManifestEntry(
                        path=srel,
                        group="compressed",
                        size_bytes=length,
                        generator="slice",
                        seed=slice_seed,
                        parent=rel,
                        params={"offset": offset, "length": length},
                    )
                )
    return entries


# --- verification ---------------------------------------------------------


@dataclass(frozen=True)
class VerifyResult:
    path: str
    status: str  # ok | mismatch | missing | unverifiable
    detail: str = ""


@dataclass
class VerifyReport:
    results: list[VerifyResult]

    @property
    def failures(self) -> list[VerifyResult]:
        return [r for r in self.results if r.status in ("mismatch", "missing")]

    @property
    def all_ok(self) -> bool:
        return not self.failures


def _regenerate(
    entry: ManifestEntry,
    by_path: dict[str, ManifestEntry],
    memo: dict[str, bytes | None],
) -> bytes | None:
    """Entry content from its seed chain, or None when not derivable."""
    if entry.path in memo:
        return memo[entry.path]
    content: bytes | None
    gen = entry.generator
    if gen == "random":
        content = keystream(entry.seed, entry.size_bytes)
    elif gen.startswith("template-") and gen.removeprefix("template-") in TEMPLATES:
        content = TEMPLATES[gen.removeprefix("template-")](entry.seed, entry.size_bytes)
    elif gen in ("gzip", "bzip2", "slice"):
        parent = by_path.get(entry.parent or "")
        parent_data = _regenerate(parent, by_path, memo) if parent else None
        if parent_data is None:
            content = None
        elif gen == "gzip":
            content = gzip.compress(parent_data, int(entry.params["level"]), mtime=0)
        elif gen == "bzip2":
            content = bz2.compress(parent_data, int(entry.params["level"]))
        else:
            off, length = int(entry.params["offset"]), int(entry.params["length"])
            content = parent_data[off : off + length]
    else:
        content = None
    memo[entry.path] = content
    return content


def verify(manifest: CorpusManifest, base_dir: str | os.PathLike) -> VerifyReport:
    """Re-derive every derivable entry and compare bit-exactly with disk."""
    base = Path(base_dir)
    by_path = {e.path: e for e in manifest.entries}
    memo: dict[str, bytes | None] = {}
    results = []
    for entry in manifest.entries:
        target = base / entry.path
        if not target.is_file():
            results.append(VerifyResult(entry.path, "missing", "file not found"))
            continue
        on_disk = target.read_bytes()
        if len(on_disk) != entry.size_bytes:
            results.append(
                VerifyResult(
                    entry.path,
                    "mismatch",
                    f"size {len(on_disk)} != manifest {entry.size_bytes}",
                )
            )
            continue
        expected = _regenerate(entry, by_path, memo)
        if expected is None:
            results.append(
                VerifyResult(entry.path, "unverifiable", f"generator {entry.generator!r}")
            )
        elif on_disk == expected:
            results.append(VerifyResult(entry.path, "ok"))
        else:
            results.append(VerifyResult(entry.path, "mismatch", "content differs"))
    return VerifyReport(results=results)


# --- one-call corpus build ------------------------------------------------


def generate_corpus(
    out_dir: str | os.PathLike,
    seed: int,
    files_per_group: int = 12,
    size_range: tuple[int, int] = (4096, 262144),
    slice_fraction: tuple[float, float] = (0.25, 0.75),
    manifest_name: str = "manifest.jsonl",
) -> CorpusManifest:
    """Build a three-group corpus under out_dir and write its manifest.

    Structured files cycle through all templates. Compression inputs use
    only the prose and tabular templates: gzip of heavily zero-padded
    records keeps enough bit-level structure to land in the structured
    regime, which would poison the compressed group's label.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries: list[ManifestEntry] = []

    template_names = tuple(TEMPLATES)
    per_template = [files_per_group // len(template_names)] * len(template_names)
    for i in range(files_per_group % len(template_names)):
        per_template[i] += 1
    for name, n in zip(template_names, per_template):
        if n:
            entries.extend(
                gen_structured(out, n, size_range, derive_seed(seed, "structured", name),
                               template=name)
            )

    # Each compression input yields 2 whole files + 2 slices.
    n_inputs = max(1, -(-files_per_group // 4))
    comp_inputs = []
    for name, n in (("prose", -(-n_inputs // 2)), ("tabular", n_inputs // 2)):
        if n:
            comp_inputs.extend(
                gen_structured(out, n, size_range, derive_seed(seed, "comp-input", name),
                               template=name, prefix=f"compinput_{name}")
            )
    comp_inputs = comp_inputs[:n_inputs]
    entries.extend(comp_inputs)
    entries.extend(
        gen_compressed(out, comp_inputs, derive_seed(seed, "compressed"),
                       slice_fraction=slice_fraction)
    )

    entries.extend(gen_random(out, files_per_group, size_range, derive_seed(seed, "random")))

    manifest = CorpusManifest(entries=entries, corpus_seed=seed)
    manifest.save(out / manifest_name)
    return manifest
