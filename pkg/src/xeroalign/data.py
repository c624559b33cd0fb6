"""Corpus schema, vocabulary, batching, and a synthetic bilingual generator.

A corpus is JSONL, one parallel pair per line:

    {"pair_id": "...",
     "source": {"tokens": [...], "intent": "...", "slots": [...], "language": "en"},
     "target": {"tokens": [...], "language": "l1", "intent": "...", "slots": [...]}}

``source`` is always labeled; ``target`` labels are optional gold used for
evaluation (and for the supervised target/translate-train baselines) and
are quarantined behind :meth:`ParallelExample.gold_target` so zero-shot
modes cannot read them by accident.

The generator replaces machine translation at desk scale: target sentences
are produced by a per-language bijective character cipher into a token set
disjoint from the source vocabulary, optionally followed by a word-order
transform that moves slot spans as units so gold tags stay valid BIO.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

IGNORE_INDEX = -100

PAD_ID = 0
CLS_ID = 1
UNK_ID = 2
RESERVED_TOKENS = ("<pad>", "<cls>", "<unk>")

BIO_TAG_RE = re.compile(r"^(O|[BI]-[A-Za-z0-9_]+)$")

TRANSFORMS = ("none", "reverse", "permute")

_CIPHER_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"


class CorpusError(ValueError):
    """Malformed corpus file, example, or generator spec."""


class TargetLabelAccessError(RuntimeError):
    """A training mode tried to read quarantined target gold labels."""


# ---------------------------------------------------------------------------
# schema


def validate_bio(tags: list[str], context: str):
    """Strict IOB2: tags match the grammar and every I continues its type."""
    prev = "O"
    for tag in tags:
        if not BIO_TAG_RE.match(tag):
            raise CorpusError(f"{context}: malformed slot tag {tag!r}")
        if tag.startswith("I-") and prev[2:] != tag[2:]:
            raise CorpusError(f"{context}: {tag!r} does not continue a {tag[2:]!r} span")
        prev = tag if tag != "O" else "O"


@dataclass
class Example:
    """A labeled utterance: tokens, intent, optional per-token BIO slots."""

    tokens: list[str]
    intent: str
    slots: Optional[list[str]]
    language: str

    def validate(self, context: str = "example"):
        if not self.tokens:
            raise CorpusError(f"{context}: empty token list")
        if self.slots is not None:
            if len(self.slots) != len(self.tokens):
                raise CorpusError(
                    f"{context}: {len(self.slots)} slot tags for {len(self.tokens)} tokens")
            validate_bio(self.slots, context)

    def to_dict(self) -> dict:
        d = {"tokens": self.tokens, "intent": self.intent, "language": self.language}
        if self.slots is not None:
            d["slots"] = self.slots
        return d


@dataclass
class ParallelExample:
    """A labeled source utterance paired with its target-language version."""

    pair_id: str
    source: Example
    target_tokens: list[str]
    target_language: str
    _target_gold: Optional[Example] = None

    # modes allowed to read target gold labels; everything else is zero-shot
    _GOLD_ACCESS = frozenset({"eval", "target", "translate_train"})

    def gold_target(self, access: str) -> Example:
        """Return the target-side gold Example; `access` names the consumer
        (a training mode, or "eval"). Zero-shot modes are refused."""
        if access not in self._GOLD_ACCESS:
            raise TargetLabelAccessError(
                f"mode {access!r} may not read target labels of pair {self.pair_id!r}")
        if self._target_gold is None:
            raise CorpusError(f"pair {self.pair_id!r} carries no target gold labels")
        return self._target_gold

    @property
    def has_target_gold(self) -> bool:
        return self._target_gold is not None


_SOURCE_FIELDS = {"tokens", "intent", "slots", "language"}
_TARGET_FIELDS = {"tokens", "intent", "slots", "language"}
_TOP_FIELDS = {"pair_id", "source", "target"}


def _example_from_dict(d: dict, required_labels: bool, context: str) -> Example:
    for key in ("tokens", "language"):
        if key not in d:
            raise CorpusError(f"{context}: missing field {key!r}")
    if required_labels and "intent" not in d:
        raise CorpusError(f"{context}: missing field 'intent'")
    ex = Example(tokens=list(d["tokens"]), intent=d.get("intent", ""),
                 slots=list(d["slots"]) if d.get("slots") is not None else None,
                 language=d["language"])
    ex.validate(context)
    return ex


def load_jsonl(path) -> list[ParallelExample]:
    """Read and validate one parallel corpus file."""
    path = Path(path)
    out: list[ParallelExample] = []
    seen_ids: set[str] = set()
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path.name}:{lineno}: malformed JSON ({exc.msg})") from exc
            unknown = set(obj) - _TOP_FIELDS
            if unknown:
                raise CorpusError(f"{path.name}:{lineno}: unknown fields {sorted(unknown)}")
            for key in _TOP_FIELDS:
                if key not in obj:
                    raise CorpusError(f"{path.name}:{lineno}: missing field {key!r}")
            pair_id = obj["pair_id"]
            if pair_id in seen_ids:
                raise CorpusError(f"{path.name}:{lineno}: duplicate pair_id {pair_id!r}")
            seen_ids.add(pair_id)
            for section, allowed in (("source", _SOURCE_FIELDS), ("target", _TARGET_FIELDS)):
                unknown = set(obj[section]) - allowed
                if unknown:
                    raise CorpusError(
                        f"{path.name}:{lineno}: unknown {section} fields {sorted(unknown)}")
            context = f"pair {pair_id!r}"
            source = _example_from_dict(obj["source"], required_labels=True, context=context)
            tgt = obj["target"]
            gold = None
            if tgt.get("intent") is not None or tgt.get("slots") is not None:
                gold = _example_from_dict(tgt, required_labels=True, context=context)
            elif "tokens" not in tgt or "language" not in tgt:
                raise CorpusError(f"{path.name}:{lineno}: target needs tokens and language")
            out.append(ParallelExample(
                pair_id=pair_id, source=source, target_tokens=list(tgt["tokens"]),
                target_language=tgt["language"], _target_gold=gold))
    return out


def save_jsonl(examples: Iterable[ParallelExample], path):
    path = Path(path)
    with path.open("w") as fh:
        for ex in examples:
            tgt = {"tokens": ex.target_tokens, "language": ex.target_language}
            if ex._target_gold is not None:
                tgt["intent"] = ex._target_gold.intent
                if ex._target_gold.slots is not None:
                    tgt["slots"] = ex._target_gold.slots
            obj = {"pair_id": ex.pair_id, "source": ex.source.to_dict(), "target": tgt}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# vocabulary and label inventories


@dataclass
class Vocab:
    """Shared multilingual token inventory; ids 0/1/2 are pad/cls/unk."""

    id_to_token: list[str]
    token_to_id: dict[str, int]

    def encode_token(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def __len__(self) -> int:
        return len(self.id_to_token)


def build_vocab(corpus: Iterable[ParallelExample], min_count: int = 1) -> Vocab:
    """First-occurrence ordering over source then target tokens per example."""
    counts: dict[str, int] = {}
    order: list[str] = []
    n = 0
    for ex in corpus:
        n += 1
        for token in itertools.chain(ex.source.tokens, ex.target_tokens):
            if token not in counts:
                counts[token] = 0
                order.append(token)
            counts[token] += 1
    if n == 0:
        raise CorpusError("cannot build a vocabulary from an empty corpus")
    id_to_token = list(RESERVED_TOKENS)
    for token in order:
        if counts[token] >= min_count:
            id_to_token.append(token)
    return Vocab(id_to_token=id_to_token,
                 token_to_id={t: i for i, t in enumerate(id_to_token)})


@dataclass
class LabelSet:
    """Intent and slot-tag inventories (built from source-side labels)."""

    intents: list[str]
    slot_tags: list[str]

    def __post_init__(self):
        self.intent_to_id = {label: i for i, label in enumerate(self.intents)}
        self.slot_to_id = {tag: i for i, tag in enumerate(self.slot_tags)}

    def intent_id(self, label: str) -> int:
        if label not in self.intent_to_id:
            raise CorpusError(f"intent label {label!r} unknown to this label set")
        return self.intent_to_id[label]

    def slot_id(self, tag: str) -> int:
        if tag not in self.slot_to_id:
            raise CorpusError(f"slot tag {tag!r} unknown to this label set")
        return self.slot_to_id[tag]


def build_labels(corpus: Iterable[ParallelExample]) -> LabelSet:
    intents: set[str] = set()
    tags: set[str] = {"O"}
    for ex in corpus:
        intents.add(ex.source.intent)
        if ex.source.slots is not None:
            tags.update(ex.source.slots)
    if not intents:
        raise CorpusError("cannot build labels from an empty corpus")
    return LabelSet(intents=sorted(intents), slot_tags=sorted(tags))


# ---------------------------------------------------------------------------
# encoding and batching


@dataclass
class EncodedExample:
    ids: list[int]
    mask: list[bool]
    intent_id: Optional[int]
    slot_ids: Optional[list[int]]
    truncated: bool


def encode_tokens(tokens: list[str], vocab: Vocab, max_len: int) -> tuple[list[int], bool]:
    """CLS-prefixed ids, silently truncated to max_len."""
    ids = [CLS_ID] + [vocab.encode_token(t) for t in tokens]
    if len(ids) > max_len:
        return ids[:max_len], True
    return ids, False


def encode_example(example: Example, vocab: Vocab, max_len: int,
                   labels: Optional[LabelSet] = None) -> EncodedExample:
    ids, truncated = encode_tokens(example.tokens, vocab, max_len)
    intent_id = labels.intent_id(example.intent) if labels is not None else None
    slot_ids = None
    if labels is not None and example.slots is not None:
        slot_ids = [IGNORE_INDEX] + [labels.slot_id(t) for t in example.slots]
        slot_ids = slot_ids[:len(ids)]  # truncate in lockstep
    return EncodedExample(ids=ids, mask=[True] * len(ids), intent_id=intent_id,
                          slot_ids=slot_ids, truncated=truncated)


def _pad_grid(rows: list[list[int]], width: int, fill: int) -> np.ndarray:
    out = np.full((len(rows), width), fill, dtype=np.int64)
    for i, row in enumerate(rows):
        out[i, :len(row)] = row
    return out


def collate_examples(examples: list[Example], vocab: Vocab, labels: LabelSet,
                     max_len: int) -> tuple[np.ndarray, np.ndarray, np.ndarray,
                                            Optional[np.ndarray], int]:
    """Pad a batch of labeled examples; returns (ids, mask, intents, slots, truncations)."""
    encoded = [encode_example(ex, vocab, max_len, labels) for ex in examples]
    width = max(len(e.ids) for e in encoded)
    ids = _pad_grid([e.ids for e in encoded], width, PAD_ID)
    mask = np.zeros((len(encoded), width), dtype=bool)
    for i, e in enumerate(encoded):
        mask[i, :len(e.ids)] = True
    intents = np.array([e.intent_id for e in encoded], dtype=np.int64)
    if any(e.slot_ids is not None for e in encoded):
        slots = _pad_grid([e.slot_ids if e.slot_ids is not None else [IGNORE_INDEX]
                           for e in encoded], width, IGNORE_INDEX)
    else:
        slots = None
    return ids, mask, intents, slots, sum(e.truncated for e in encoded)


def collate_utterances(token_lists: list[list[str]], vocab: Vocab,
                       max_len: int) -> tuple[np.ndarray, np.ndarray]:
    rows = [encode_tokens(tokens, vocab, max_len)[0] for tokens in token_lists]
    width = max(len(r) for r in rows)
    ids = _pad_grid(rows, width, PAD_ID)
    mask = np.zeros((len(rows), width), dtype=bool)
    for i, r in enumerate(rows):
        mask[i, :len(r)] = True
    return ids, mask


@dataclass
class Batch:
    """Row-aligned source (labeled) and target (utterance-only) tensors."""

    pair_ids: list[str]
    src_ids: np.ndarray
    src_mask: np.ndarray
    intent_ids: np.ndarray
    slot_ids: Optional[np.ndarray]
    tgt_ids: Optional[np.ndarray] = None
    tgt_mask: Optional[np.ndarray] = None


def shuffled_index_batches(n: int, batch_size: int, seed: int,
                           epoch: int) -> list[np.ndarray]:
    """Deterministic (seed, epoch) shuffle, chunked into batches."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    perm = np.random.default_rng([seed, epoch]).permutation(n)
    return [perm[i:i + batch_size] for i in range(0, n, batch_size)]


def make_batches(corpus: list[ParallelExample], vocab: Vocab, labels: LabelSet,
                 batch_size: int, seed: int, epoch: int,
                 max_len: int = 32) -> list[Batch]:
    """Batch parallel pairs: source and its translation travel in one step."""
    batches = []
    for idx in shuffled_index_batches(len(corpus), batch_size, seed, epoch):
        entries = [corpus[i] for i in idx]
        ids, mask, intents, slots, _ = collate_examples(
            [e.source for e in entries], vocab, labels, max_len)
        tgt_ids, tgt_mask = collate_utterances(
            [e.target_tokens for e in entries], vocab, max_len)
        batches.append(Batch(pair_ids=[e.pair_id for e in entries],
                             src_ids=ids, src_mask=mask, intent_ids=intents,
                             slot_ids=slots, tgt_ids=tgt_ids, tgt_mask=tgt_mask))
    return batches


# ---------------------------------------------------------------------------
# dataset directory layout


@dataclass
class DatasetBundle:
    """All splits of one generated (or converted) benchmark directory."""

    source_language: str
    target_languages: list[str]
    splits: dict[str, dict[str, list[ParallelExample]]]  # split -> language -> pairs

    def corpus(self, split: str, language: str) -> list[ParallelExample]:
        try:
            return self.splits[split][language]
        except KeyError:
            raise CorpusError(f"no corpus for split {split!r} / language {language!r}")


def load_dataset(data_dir) -> DatasetBundle:
    data_dir = Path(data_dir)
    pattern = re.compile(r"^(train|dev|test)\.([A-Za-z0-9_]+)\.jsonl$")
    splits: dict[str, dict[str, list[ParallelExample]]] = {}
    for path in sorted(data_dir.glob("*.jsonl")):
        m = pattern.match(path.name)
        if not m:
            continue
        split, lang = m.group(1), m.group(2)
        splits.setdefault(split, {})[lang] = load_jsonl(path)
    if "train" not in splits:
        raise CorpusError(f"no train.*.jsonl files found in {data_dir}")
    some = next(iter(splits["train"].values()))
    source_language = some[0].source.language
    targets = sorted(l for l in splits["train"] if l != source_language)
    return DatasetBundle(source_language=source_language, target_languages=targets,
                         splits=splits)


# ---------------------------------------------------------------------------
# synthetic benchmark generator


@dataclass
class SynthSpec:
    """Generator spec: templates with [SLOT] placeholders, slot lexicons,
    target language names, a word-order transform, and split sizes."""

    templates: dict[str, list[str]]
    lexicons: dict[str, list[str]]
    languages: list[str]
    seed: int = 13
    transform: str = "none"
    train_size: int = 2000
    dev_size: int = 400
    test_size: int = 400
    source_language: str = "en"
    max_len: int = 32

    def validate(self):
        if not self.templates:
            raise CorpusError("spec has no intents")
        if self.transform not in TRANSFORMS:
            raise CorpusError(f"unknown transform {self.transform!r}; know {TRANSFORMS}")
        if not self.languages:
            raise CorpusError("spec lists no target languages")
        if self.source_language in self.languages:
            raise CorpusError("target languages must differ from the source language")
        for intent, templates in self.templates.items():
            if not templates:
                raise CorpusError(f"intent {intent!r} has no templates")
            for template in templates:
                for slot in _template_slots(template):
                    if slot not in self.lexicons:
                        raise CorpusError(
                            f"template {template!r} references unknown slot type {slot!r}")

    @property
    def n_intents(self) -> int:
        return len(self.templates)


_SLOT_RE = re.compile(r"^\[([A-Za-z0-9_]+)\]$")


def _template_slots(template: str) -> list[str]:
    return [m.group(1) for token in template.split()
            if (m := _SLOT_RE.match(token))]


def _template_chunks(template: str, fillers: list[list[str]]) -> list[tuple[list[str], Optional[str]]]:
    """Render a template into (tokens, slot_type) chunks; slot spans are one chunk."""
    chunks: list[tuple[list[str], Optional[str]]] = []
    filler_iter = iter(fillers)
    for token in template.split():
        m = _SLOT_RE.match(token)
        if m:
            chunks.append((next(filler_iter), m.group(1)))
        else:
            chunks.append(([token], None))
    return chunks


def _chunks_to_example(chunks, intent: str, language: str) -> Example:
    tokens: list[str] = []
    tags: list[str] = []
    for chunk_tokens, slot in chunks:
        for j, token in enumerate(chunk_tokens):
            tokens.append(token)
            tags.append("O" if slot is None else ("B-" + slot if j == 0 else "I-" + slot))
    return Example(tokens=tokens, intent=intent, slots=tags, language=language)


class Cipher:
    """Per-language bijective token mapping, disjoint from source tokens."""

    def __init__(self, seed: int, language: str, language_index: int):
        rng = np.random.default_rng([seed, 7919, language_index])
        shuffled = "".join(np.array(list(_CIPHER_ALPHABET))[
            rng.permutation(len(_CIPHER_ALPHABET))])
        self.language = language
        self._forward = str.maketrans(_CIPHER_ALPHABET, shuffled)
        self._inverse = str.maketrans(shuffled, _CIPHER_ALPHABET)
        self._suffix = "_" + language

    def encode_token(self, token: str) -> str:
        return token.translate(self._forward) + self._suffix

    def decode_token(self, token: str) -> str:
        if not token.endswith(self._suffix):
            raise CorpusError(f"token {token!r} is not in language {self.language!r}")
        return token[:-len(self._suffix)].translate(self._inverse)

    def encode(self, tokens: list[str]) -> list[str]:
        return [self.encode_token(t) for t in tokens]

    def decode(self, tokens: list[str]) -> list[str]:
        return [self.decode_token(t) for t in tokens]


def ciphers_for(spec: SynthSpec) -> dict[str, Cipher]:
    return {lang: Cipher(spec.seed, lang, i)
            for i, lang in enumerate(spec.languages)}


def _transform_chunks(chunks, spec: SynthSpec, template_index: int):
    if spec.transform == "none":
        return chunks
    if spec.transform == "reverse":
        return list(reversed(chunks))
    perm = np.random.default_rng([spec.seed, 104729, template_index]).permutation(len(chunks))
    return [chunks[i] for i in perm]


def _intent_quotas(total: int, n_intents: int) -> list[int]:
    base, extra = divmod(total, n_intents)
    return [base + (1 if i < extra else 0) for i in range(n_intents)]


@dataclass
class GeneratedCorpus:
    """In-memory result of one generator run."""

    # split -> language -> pairs; the source language holds self-pairs
    splits: dict[str, dict[str, list[ParallelExample]]]
    stats: dict


def generate_corpus(spec: SynthSpec) -> GeneratedCorpus:
    """Deterministically sample, cipher, and split the benchmark."""
    spec.validate()
    rng = np.random.default_rng([spec.seed, 3571])
    ciphers = ciphers_for(spec)
    split_names = ("train", "dev", "test")
    sizes = {"train": spec.train_size, "dev": spec.dev_size, "test": spec.test_size}
    quotas = {s: _intent_quotas(sizes[s], spec.n_intents) for s in split_names}

    # global template index (for per-template permutations), stable per spec
    template_index: dict[tuple[str, int], int] = {}
    for intent in spec.templates:
        for ti in range(len(spec.templates[intent])):
            template_index[(intent, ti)] = len(template_index)

    per_split: dict[str, list[tuple[str, list]]] = {s: [] for s in split_names}
    for ii, (intent, templates) in enumerate(spec.templates.items()):
        combos: list[tuple[int, tuple[int, ...]]] = []
        for ti, template in enumerate(templates):
            slots = _template_slots(template)
            choice_ranges = [range(len(spec.lexicons[s])) for s in slots]
            combos.extend((ti, picks) for picks in itertools.product(*choice_ranges))
        order = rng.permutation(len(combos))
        seen: set[str] = set()
        needed = [(s, quotas[s][ii]) for s in split_names]
        cursor = 0
        for split, quota in needed:
            taken = 0
            while taken < quota:
                if cursor >= len(order):
                    raise CorpusError(
                        f"intent {intent!r} cannot supply {sum(q for _, q in needed)} "
                        f"unique utterances (only {len(seen)} distinct surface forms)")
                ti, picks = combos[order[cursor]]
                cursor += 1
                template = templates[ti]
                slots = _template_slots(template)
                fillers = [spec.lexicons[s][p].split() for s, p in zip(slots, picks)]
                chunks = _template_chunks(template, fillers)
                surface = " ".join(t for toks, _ in chunks for t in toks)
                if surface in seen:
                    continue
                seen.add(surface)
                per_split[split].append((intent, chunks, template_index[(intent, ti)]))
                taken += 1

    splits: dict[str, dict[str, list[ParallelExample]]] = {}
    stats_splits: dict[str, dict] = {}
    for split in split_names:
        entries = per_split[split]
        order = np.random.default_rng([spec.seed, 9002, split_names.index(split)])\
            .permutation(len(entries))
        entries = [entries[i] for i in order]
        by_lang: dict[str, list[ParallelExample]] = {
            lang: [] for lang in [spec.source_language] + list(spec.languages)}
        intent_hist: dict[str, int] = {}
        tag_hist: dict[str, int] = {}
        truncations = 0
        for idx, (intent, chunks, tmpl_idx) in enumerate(entries):
            pair_id = f"{split}-{idx:05d}"
            source = _chunks_to_example(chunks, intent, spec.source_language)
            source.validate(f"pair {pair_id!r}")
            if len(source.tokens) + 1 > spec.max_len:
                truncations += 1
            intent_hist[intent] = intent_hist.get(intent, 0) + 1
            for tag in source.slots:
                tag_hist[tag] = tag_hist.get(tag, 0) + 1
            by_lang[spec.source_language].append(ParallelExample(
                pair_id=pair_id, source=source, target_tokens=list(source.tokens),
                target_language=spec.source_language, _target_gold=source))
            for lang in spec.languages:
                ciphered = [(ciphers[lang].encode(toks), slot) for toks, slot in chunks]
                reordered = _transform_chunks(ciphered, spec, tmpl_idx)
                gold = _chunks_to_example(reordered, intent, lang)
                gold.validate(f"pair {pair_id!r} [{lang}]")
                by_lang[lang].append(ParallelExample(
                    pair_id=pair_id, source=source, target_tokens=gold.tokens,
                    target_language=lang, _target_gold=gold))
        splits[split] = by_lang
        counts = list(intent_hist.values())
        if counts and entries:
            uniform = len(entries) / spec.n_intents
            if max(counts) > 1.2 * uniform or min(counts) < 0.8 * uniform:
                raise CorpusError(f"intent balance violated in split {split!r}: {intent_hist}")
        stats_splits[split] = {
            "examples_per_language": {lang: len(v) for lang, v in by_lang.items()},
            "intent_histogram": dict(sorted(intent_hist.items())),
            "slot_tag_histogram": dict(sorted(tag_hist.items())),
            "truncations": truncations,
        }
    stats = {
        "languages": [spec.source_language] + list(spec.languages),
        "transform": spec.transform,
        "seed": spec.seed,
        "splits": stats_splits,
    }
    return GeneratedCorpus(splits=splits, stats=stats)


def synth_generate(spec: SynthSpec, out_dir) -> list[Path]:
    """Generate the benchmark and write one JSONL per (split, language),
    plus a stats.json report. Returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(spec)
    written: list[Path] = []
    for split, by_lang in corpus.splits.items():
        for lang, examples in by_lang.items():
            path = out_dir / f"{split}.{lang}.jsonl"
            save_jsonl(examples, path)
            written.append(path)
    stats_path = out_dir / "stats.json"
    stats_path.write_text(json.dumps(corpus.stats, sort_keys=True, indent=1) + "\n")
    written.append(stats_path)
    return written


# ---------------------------------------------------------------------------
# shipped default benchmark spec


def default_spec(**overrides) -> SynthSpec:
    """8 intents, 4 slot types, 3 cipher languages, 2000 train pairs."""
    lexicons = {
        "TIME": [
            "seven", "noon", "midnight", "nine", "six thirty", "ten am",
            "five pm", "eight fifteen", "half past two", "quarter past nine",
            "four twenty", "eleven", "three", "twelve thirty", "one oh five",
            "two forty", "nine pm", "six am", "seven fifteen", "ten thirty",
            "quarter to five", "eight", "five", "one",
        ],
        "PLACE": [
            "home", "work", "the office", "new york", "berlin", "the gym",
            "downtown", "the airport", "paris", "the station", "my desk",
            "the kitchen", "tokyo", "school", "the garage", "madrid",
            "the park", "the library", "oslo", "the lobby",
        ],
        "ITEM": [
            "jazz", "heavy metal", "the news", "my playlist", "classical music",
            "rock", "a podcast", "the radio", "lo fi beats", "pop songs",
            "blues", "my favorites", "country", "techno", "soft piano",
            "indie rock", "the charts", "disco", "soul", "ambient noise",
        ],
        "DURATION": [
            "ten minutes", "an hour", "five minutes", "two hours",
            "thirty seconds", "half an hour", "one minute", "twenty minutes",
            "ninety seconds", "three hours", "a minute", "six hours",
            "fifteen minutes", "forty seconds", "two minutes", "an hour and a half",
        ],
    }
    templates = {
        "alarm_set": [
            "wake me at [TIME]",
            "set an alarm for [TIME]",
            "i need an alarm at [TIME]",
            "alarm for [TIME] please",
            "wake me at [TIME] when i am at [PLACE]",
        ],
        "alarm_cancel": [
            "cancel my alarm",
            "cancel the alarm at [TIME]",
            "remove my [TIME] alarm now",
            "turn off every alarm i have set",
            "cancel the [TIME] alarm before we leave for [PLACE]",
        ],
        "weather_query": [
            "what is the weather in [PLACE]",
            "will it rain in [PLACE] today",
            "give me the forecast for [PLACE]",
            "how cold is it in [PLACE] right now",
            "weather in [PLACE] at [TIME]",
        ],
        "reminder_set": [
            "remind me in [DURATION]",
            "set a reminder for [TIME]",
            "create a reminder for [TIME]",
            "i need a reminder in [DURATION] please",
            "remind me at [TIME] about the meeting in [PLACE]",
        ],
        "music_play": [
            "play [ITEM]",
            "play some [ITEM] for me",
            "start playing [ITEM] right now",
            "i want to hear [ITEM]",
            "play [ITEM] when i get to [PLACE]",
        ],
        "timer_start": [
            "start a timer for [DURATION]",
            "set a [DURATION] timer",
            "timer for [DURATION] starting now",
            "count down [DURATION] for me",
            "start a [DURATION] timer when i reach [PLACE]",
        ],
        "light_on": [
            "turn on the lights",
            "lights on in [PLACE]",
            "switch on the lamp in [PLACE]",
            "make it bright in here please",
            "turn on the lights in [PLACE] for [DURATION]",
        ],
        "light_off": [
            "turn off the lights",
            "lights off in [PLACE]",
            "switch off the lamp in [PLACE]",
            "make it dark in here now",
            "turn off the lights in [PLACE] after [DURATION]",
        ],
    }
    spec = SynthSpec(templates=templates, lexicons=lexicons,
                     languages=["l1", "l2", "l3"])
    for key, value in overrides.items():
        if not hasattr(spec, key):
            raise CorpusError(f"unknown spec field {key!r}")
        setattr(spec, key, value)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# key-value spec files


def spec_from_config(text: str) -> SynthSpec:
    """Parse the documented key-value format:

        languages = l1, l2, l3
        train_size = 2000
        transform = none
        slot.TIME = seven | noon | six thirty
        template.alarm_set = wake me at [TIME] | alarm for [TIME] please
    """
    templates: dict[str, list[str]] = {}
    lexicons: dict[str, list[str]] = {}
    scalars: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CorpusError(f"spec line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("template."):
            templates[key[len("template."):]] = [v.strip() for v in value.split("|") if v.strip()]
        elif key.startswith("slot."):
            lexicons[key[len("slot."):]] = [v.strip() for v in value.split("|") if v.strip()]
        else:
            scalars[key] = value
    kwargs: dict = {}
    if "languages" in scalars:
        kwargs["languages"] = [v.strip() for v in scalars.pop("languages").split(",") if v.strip()]
    for key in ("train_size", "dev_size", "test_size", "seed", "max_len"):
        if key in scalars:
            kwargs[key] = int(scalars.pop(key))
    for key in ("transform", "source_language"):
        if key in scalars:
            kwargs[key] = scalars.pop(key)
    if scalars:
        raise CorpusError(f"unknown spec keys {sorted(scalars)}")
    if not templates:
        raise CorpusError("spec file defines no template.<intent> entries")
    spec = SynthSpec(templates=templates, lexicons=lexicons,
                     languages=kwargs.pop("languages", ["l1", "l2", "l3"]))
    for key, value in kwargs.items():
        setattr(spec, key, value)
    spec.validate()
    return spec
