"""Acceptance suite: one test per top-level criterion, at stated tolerances."""

import random
import string
import time
from datetime import timedelta
from itertools import product

import numpy as np
import pytest

from reviewforensics.corpus import f_k1
from reviewforensics.fakecues import (
    CUE_NUMERIC_USERNAME,
    CUE_REPEATED_CHAR,
    CUE_REPEATED_TOKEN,
    detect_fakes,
    levenshtein,
    similarity_pairs,
)
from reviewforensics.phases import partition_equal_count, sentiment_bucket
from reviewforensics.pipeline import PipelineConfig, run_pipeline
from reviewforensics.stats import cluster_of, mean_score, polarity_share, score_table
from reviewforensics.textnorm import normalize
from reviewforensics.vocab import (
    LabelAssignment,
    Vocabulary,
    VocabEntry,
    default_vocabularies,
    default_vocabulary_text,
    expansion_step,
    filter_unlabeled,
    initial_state,
    label_corpus,
)

from conftest import (
    RELEASE_DAY,
    expected_assignments,
    labeled_fixture_corpus,
    make_body,
    make_corpus,
    make_review,
    make_username,
    table_a1_corpus,
)
from test_fakecues import dp_levenshtein


def _report(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


# --------------------------------------------------------------------------
# Criterion 1: score-distribution reproduction on the N=51,120 fixture.

def test_acceptance_table_a1_reproduction():
    started = time.perf_counter()
    corpus = table_a1_corpus()
    rows = score_table(corpus)
    f0 = rows[0].f_x
    f10 = rows[10].f_x
    mean = mean_score(corpus)
    polarity = polarity_share(corpus)
    elapsed = time.perf_counter() - started

    assert len(corpus) == 51_120
    assert abs(round(f0, 2) - 0.27) <= 0.005
    assert abs(round(f10, 2) - 0.33) <= 0.005
    assert abs(mean - 5.04) <= 0.01
    assert abs(polarity - 0.704) <= 0.002
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    _report("tableA1-reproduction")


# --------------------------------------------------------------------------
# Criterion 2: shipped vocabularies are surface-for-surface faithful and the
# 40-review fixture gets exactly the expected assignments.

PUBLISHED_VOCABULARIES = {
    "P": (
        ["agenda", "alt right", "altright", "cancel cult", "cancell", "conservative",
         "democra", "far left", "far right", "fascis", "feminis", "gamergate", "ideol",
         "jew", "kike", "leftis", "nazi", "politic", "progressive", "propagand",
         "racis", "shill", "sjw", "social justice warrior", "virtue sign"],
        ["activis", "alt-right", "anita", "asia", "far-right", "feminaz", "freedom of",
         "globohomo", "idealog", "idelog", "ideolog", "lectur", "moral", "polical",
         "propogan", "religio", "retcon", "socialis", "sponsor", "trump", "white man",
         "white men", "woke"],
    ),
    "Q": (
        ["gender", "bisex", "dyke", "fag", "faggot", "gay", "gender", "heterosex",
         "homophob", "homosex", "intersex", "lesb", "lgbt", "non-binary", "nonbinary",
         "pansexual", "queer", "trann"],
        ["androge", "cis", "degenerate", "dyke", "erotic", "femenin", "hetero", "homos",
         "hulk", "inclusi", "kiss", "lbgt", "lezb", "lezz", "masculin", "pedo", "porn",
         "same sex", "sex scene", "shemale", "sodom", "stereotyp", "taboo"],
    ),
    "M": (
        ["bombin", "boycot", "controvers", "critic", "fake", "journalis", "metacritic",
         "ratin", "sabotag", "scor", "streamer", "troll"],
        ["19th", "are mad", "balanc", "bandwag", "bias", "blind", "bots", "bottin",
         "brigad", "comment", "communit", "complain", "critiq", "crybab", "divisiv",
         "downvot", "fanboy", "first day", "grade", "hater", "ignore the", "immature",
         "incel", "jedi", "moron", "overreact", "people who", "polar", "salty",
         "statistic", "star war", "the 0", "the zero", "user", "who hate"],
    ),
    "T": (
        ["abbie", "actin", "actor", "antagonist", "boss", "character", "dinah", "ellie",
         "fireflies", "gameplay", "gold", "graphic", "hero", "jess", "jj", "joel", "lev",
         "manni", "mechanic", "murderer", "music", "narrat", "protagonist", "storytell",
         "tomm", "villain", "visua", "writing", "yara"],
        ["animat", "atmospher", "bugs", "cinematic", "clich", "collectibl", "combat",
         "cut scene", "cutscen", "design", "dialog", "ebby", "environment", "execut",
         "flashbac", "flaw", "frame rat", "framerat", "game play", "gamebreak",
         "gaming exp", "gampl", "glitc", "gore", "goty", "grafic", "improvemen",
         "innovative", "linear", "loot", "melee", "motion blur", "open world",
         "openworl", "pathin", "performa", "platin", "plot", "puzzle", "realistic",
         "sandbox", "script", "sideque", "storyl", "structur", "technic", "worldbuild"],
    ),
}


def _file_sections(label: str) -> tuple[list[str], list[str]]:
    prior: list[str] = []
    posterior: list[str] = []
    target = None
    for raw in default_vocabulary_text(label).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[prior]":
            target = prior
        elif line == "[posterior]":
            target = posterior
        else:
            assert target is not None
            target.append(line.split("@round=", 1)[0].strip())
    return prior, posterior


def test_acceptance_vocabulary_fidelity():
    for label, (prior, posterior) in PUBLISHED_VOCABULARIES.items():
        got_prior, got_posterior = _file_sections(label)
        assert got_prior == prior, f"{label} prior differs"
        assert got_posterior == posterior, f"{label} posterior differs"

    corpus = labeled_fixture_corpus()
    assert len(corpus) == 40
    vocabs = default_vocabularies()
    got = {a.review_id: a.labels for a in label_corpus(corpus, vocabs.values())}
    assert got == expected_assignments()

    # the three named behaviours
    the0 = label_corpus(
        make_corpus([make_review(0, 0, body="everyone should ignore the 0 ratings below")]),
        vocabs.values(),
    )[0]
    assert the0.M
    apolitical = label_corpus(
        make_corpus([make_review(0, 5, body="a deeply apolitical look at a broken family")]),
        vocabs.values(),
    )[0]
    assert not apolitical.P
    political = label_corpus(
        make_corpus([make_review(0, 0, body="this is political through and through")]),
        vocabs.values(),
    )[0]
    assert political.P
    _report("vocabulary-fidelity")


# --------------------------------------------------------------------------
# Criterion 3: cluster mapping, exhaustive plus a 1,000-trial property.

def test_acceptance_cluster_mapping():
    def expected_cluster(p, q, m, t):
        value = p or q or m
        if not value and not t:
            return 1
        if value and not t:
            return 2
        if value and t:
            return 3
        return 4

    for p, q, m, t in product((0, 1), repeat=4):
        labels = frozenset(
            lab for lab, flag in zip("PQMT", (p, q, m, t)) if flag
        )
        a = LabelAssignment(review_id="x", labels=labels)
        assert cluster_of(a) == expected_cluster(p, q, m, t)

    rng = random.Random(1234)
    for _ in range(1000):
        n = rng.randint(1, 300)
        assignments = [
            LabelAssignment(
                review_id=str(i),
                labels=frozenset(lab for lab in "PQMT" if rng.random() < 0.3),
            )
            for i in range(n)
        ]
        sizes = {c: 0 for c in (1, 2, 3, 4)}
        for a in assignments:
            sizes[cluster_of(a)] += 1
        assert sum(sizes.values()) == n
    _report("cluster-mapping")


# --------------------------------------------------------------------------
# Criterion 4: fake cues with planted ground truth, oracle-exact similarity
# join, and the 50k-item timing budget.

def _planted_cue_corpus():
    reviews = []
    truth: dict[str, set[str]] = {}
    for i in range(9_700):
        reviews.append(make_review(i, i % 11, RELEASE_DAY + timedelta(days=i % 30)))
    for j in range(100):
        i = 10_000 + j
        rid = f"r{i:06d}"
        reviews.append(
            make_review(i, 0, RELEASE_DAY, username=str(900_000_000 + j * 7919))
        )
        truth[rid] = {CUE_NUMERIC_USERNAME}
    for j in range(100):
        i = 11_000 + j
        rid = f"r{i:06d}"
        reviews.append(make_review(i, 0, RELEASE_DAY, body=make_body(i) + " spam spam spam"))
        truth[rid] = {CUE_REPEATED_TOKEN}
    for j in range(100):
        i = 12_000 + j
        rid = f"r{i:06d}"
        reviews.append(make_review(i, 0, RELEASE_DAY, body=make_body(i) + " aaaaah"))
        truth[rid] = {CUE_REPEATED_CHAR}
    return make_corpus(reviews), truth


def test_acceptance_fake_cue_precision_recall():
    corpus, truth = _planted_cue_corpus()
    assert len(corpus) == 10_000
    report = detect_fakes(corpus)
    got = {f.review_id: set(f.cues) for f in report.flags}
    assert got == truth  # precision = recall = 1.0, cue attribution exact
    _report("fake-cues-planted")


def _random_text(rng, lo=25, hi=60):
    return "".join(
        rng.choice(string.ascii_lowercase + string.digits)
        for _ in range(rng.randint(lo, hi))
    )


def _mutate(rng, text, edits):
    out = list(text)
    for _ in range(edits):
        op = rng.choice("sid")
        pos = rng.randrange(len(out))
        if op == "s":
            out[pos] = rng.choice(string.ascii_lowercase)
        elif op == "i":
            out.insert(pos, rng.choice(string.ascii_lowercase))
        elif len(out) > 1:
            del out[pos]
    return "".join(out)


def numpy_oracle_pairs(items, threshold):
    """Exhaustive all-pairs oracle.

    Enumerates every pair; prunes only with provable lower bounds on the
    edit distance (length difference and character-count imbalance), then
    settles survivors with the plain quadratic dynamic program.
    """
    ids = [i for i, _ in items]
    texts = [t for _, t in items]
    n = len(texts)
    lens = np.array([len(t) for t in texts], dtype=np.int32)
    alphabet = sorted(set("".join(texts)))
    col = {c: k for k, c in enumerate(alphabet)}
    counts = np.zeros((n, len(alphabet)), dtype=np.int16)
    for r, t in enumerate(texts):
        for c in t:
            counts[r, col[c]] += 1

    out = set()
    for i in range(n - 1):
        longest = np.maximum(lens[i], lens[i + 1 :])
        budget = (1.0 - threshold) * longest + 1e-9
        len_ok = np.abs(lens[i + 1 :] - lens[i]) <= budget
        bag = np.abs(counts[i + 1 :] - counts[i]).sum(axis=1) / 2.0
        survivors = np.nonzero(len_ok & (bag <= budget))[0]
        for off in survivors:
            j = i + 1 + off
            longest_ij = max(lens[i], lens[j])
            d = dp_levenshtein(texts[i], texts[j])
            if 1.0 - d / longest_ij >= threshold - 1e-9:
                pair = (ids[i], ids[j]) if str(ids[i]) <= str(ids[j]) else (ids[j], ids[i])
                out.add(pair)
    return out


def test_acceptance_similarity_join_oracle_exact():
    rng = random.Random(20200619)
    items = [(f"n{k:04d}", _random_text(rng)) for k in range(800)]
    planted = set()
    for k in range(500):
        base_id, base = items[k]
        partner_id = f"p{k:04d}"
        items.append((partner_id, _mutate(rng, base, rng.randint(1, 2))))
        planted.add((base_id, partner_id) if base_id <= partner_id else (partner_id, base_id))

    got = {(a, b) for a, b, _ in similarity_pairs(items, 0.85)}
    expected = numpy_oracle_pairs(items, 0.85)
    assert planted <= got
    assert got == expected
    _report("similarity-join-oracle")


def test_acceptance_similarity_join_scale():
    rng = random.Random(7777)
    items = [(f"n{k:05d}", _random_text(rng, lo=20, hi=60)) for k in range(49_500)]
    planted = set()
    for k in range(500):
        base_id, base = items[k * 7]
        partner_id = f"p{k:04d}"
        items.append((partner_id, _mutate(rng, base, 1)))
        planted.add((base_id, partner_id) if base_id <= partner_id else (partner_id, base_id))
    assert len(items) == 50_000

    started = time.perf_counter()
    pairs = similarity_pairs(items, 0.85)
    elapsed = time.perf_counter() - started

    got = {(a, b) for a, b, _ in pairs}
    assert planted <= got
    assert elapsed < 60.0, f"took {elapsed:.1f}s for 50,000 items"
    _report("similarity-join-scale")


# --------------------------------------------------------------------------
# Criterion 5: edit distance against the quadratic reference.

def test_acceptance_levenshtein_oracle():
    rng = random.Random(451)
    for _ in range(1000):
        a = "".join(rng.choice("abcdefgh") for _ in range(rng.randint(0, 50)))
        b = "".join(rng.choice("abcdefgh") for _ in range(rng.randint(0, 50)))
        assert levenshtein(a, b) == dp_levenshtein(a, b)
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("david2000", "davvid2000") == 1
    _report("levenshtein-oracle")


# --------------------------------------------------------------------------
# Criterion 6: sentiment buckets and phase partitioning.

def test_acceptance_phase_sentiment():
    expected_buckets = {
        0: "VeryBad", 1: "VeryBad",
        2: "Bad", 3: "Bad", 4: "Bad",
        5: "Neutral", 6: "Neutral", 7: "Neutral",
        8: "Good", 9: "Good",
        10: "VeryGood",
    }
    for score, bucket in expected_buckets.items():
        assert sentiment_bucket(score) == bucket

    # release spike: first two days hold 20% of N -> they are exactly Phase 1
    day_counts = [120, 80] + [800 // 38 + (1 if d < 800 % 38 else 0) for d in range(38)]
    reviews = []
    i = 0
    for offset, count in enumerate(day_counts):
        for _ in range(count):
            reviews.append(make_review(i, i % 11, RELEASE_DAY + timedelta(days=offset)))
            i += 1
    corpus = make_corpus(reviews)
    part = partition_equal_count(corpus, 5)
    assert part.phases[0].first_day == RELEASE_DAY
    assert part.phases[0].last_day == RELEASE_DAY + timedelta(days=1)
    assert part.phases[0].count == 200

    rng = random.Random(99)
    for _ in range(200):
        n = rng.randint(1, 400)
        p = rng.randint(1, 8)
        corpus = make_corpus(
            [
                make_review(i, rng.randint(0, 10), RELEASE_DAY + timedelta(days=rng.randint(0, 20)))
                for i in range(n)
            ]
        )
        sizes = [ph.count for ph in partition_equal_count(corpus, p, "exact-count").phases]
        assert sum(sizes) == n
        assert max(sizes) - min(sizes) <= 1
    _report("phase-sentiment")


# --------------------------------------------------------------------------
# Criterion 7: expansion-loop properties over 500 random trajectories.

_EXPANSION_WORDS = (
    "alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo lima "
    "mike november oscar papa quebec romeo sierra tango uniform victor whiskey"
).split()


def test_acceptance_expansion_loop_properties():
    rng = random.Random(31337)
    for trial in range(500):
        n = rng.randint(1, 20)
        corpus = make_corpus(
            [
                make_review(i, rng.randint(0, 10), body=" ".join(rng.choices(_EXPANSION_WORDS, k=rng.randint(3, 9))))
                for i in range(n)
            ]
        )
        seeds = rng.sample(_EXPANSION_WORDS, rng.randint(0, 2))
        vocab = Vocabulary("X", [VocabEntry(w) for w in seeds])
        state = initial_state(corpus, vocab)
        labeled_before = {r.id for r in corpus if r.id not in state.filtered_ids}

        rounds = 0
        while not state.converged and rounds < 30:
            pool = [t for t, _ in state.candidates[:5] if t not in vocab]
            accepted = rng.sample(pool, min(len(pool), rng.randint(0, 2)))
            prev = state
            state = expansion_step(corpus, vocab, state, accepted)
            # filtered set weakly shrinks; empty accept converges untouched
            assert state.filtered_ids <= prev.filtered_ids
            if not accepted:
                assert state.converged
                assert state.filtered_ids == prev.filtered_ids
                assert state.round == prev.round
            labeled_now = {r.id for r in corpus if r.id not in state.filtered_ids}
            assert labeled_before <= labeled_now  # labels are monotone
            labeled_before = labeled_now
            rounds += 1
        assert state.converged or rounds == 30
    _report("expansion-loop-properties")


# --------------------------------------------------------------------------
# Criterion 8: byte-identical pipeline outputs on identical inputs.

def test_acceptance_pipeline_determinism(tmp_path):
    from reviewforensics.corpus import FORMAT_RECORD_LINES, write_corpus
    from test_pipeline import small_corpus

    input_path = tmp_path / "corpus.jsonl"
    write_corpus(small_corpus(), input_path, FORMAT_RECORD_LINES)

    outputs = []
    for run in ("one", "two"):
        cfg = PipelineConfig(
            inputs=(str(input_path),),
            format=FORMAT_RECORD_LINES,
            out_dir=str(tmp_path / run),
            phases=5,
        )
        run_pipeline(cfg)
        tables = sorted((tmp_path / run / "tables").iterdir())
        outputs.append({p.name: p.read_bytes() for p in tables})
    assert outputs[0] == outputs[1]
    _report("pipeline-determinism")
