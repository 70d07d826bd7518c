"""Shared fixture builders: synthetic corpora with known ground truth."""

from __future__ import annotations

import hashlib
import random
from datetime import date, timedelta

import pytest

from reviewforensics.corpus import Corpus, Provenance, Review
from reviewforensics.fakecues import cue_repeated_char, cue_repeated_token

RELEASE_DAY = date(2020, 6, 19)

# Marginal score counts of the reference incident (N=51,120).
SCORE_COUNTS = {
    0: 13969,
    1: 4923,
    2: 2769,
    3: 2391,
    4: 1950,
    5: 1234,
    6: 885,
    7: 822,
    8: 1660,
    9: 3399,
    10: 17118,
}

_B36 = "abcdefghijklmnopqrstuvwxyz0123456789"


def b36(i: int, salt: str, length: int) -> str:
    """Deterministic pseudo-word; hash-derived so no two are near-duplicates."""
    value = int.from_bytes(
        hashlib.blake2b(f"{salt}:{i}".encode(), digest_size=12).digest(), "big"
    )
    out = []
    for _ in range(length):
        out.append(_B36[value % 36])
        value //= 36
    return "".join(out)


def make_body(i: int) -> str:
    """Synthetic review body: >= 75 chars, no label matches, no fake cues."""
    for attempt in range(10):
        words = [b36(i, f"b{attempt}.{j}", 4 + (i + j) % 4) for j in range(14)]
        body = " ".join(words)
        if len(body) >= 75 and not cue_repeated_token(body) and not cue_repeated_char(body):
            return body
    raise AssertionError(f"could not build a clean body for {i}")


def make_username(i: int) -> str:
    return "u" + b36(i, "uname", 9)


def make_review(
    i: int,
    score: int,
    day: date = RELEASE_DAY,
    body: str | None = None,
    username: str | None = None,
    prior: int = 0,
) -> Review:
    return Review(
        id=f"r{i:06d}",
        username=username or make_username(i),
        body=body if body is not None else make_body(i),
        score=score,
        day=day,
        prior_reviews=prior,
    )


def make_corpus(reviews, source: str = "fixture") -> Corpus:
    ordered = sorted(reviews, key=lambda r: r.day)
    return Corpus(
        reviews=tuple(ordered),
        provenance=Provenance(source=source, ingested_at="1970-01-01T00:00:00+00:00"),
    )


def table_a1_corpus() -> Corpus:
    """Corpus reproducing the reference marginal score counts over 40 days."""
    reviews = []
    i = 0
    for score in range(11):
        for j in range(SCORE_COUNTS[score]):
            day = RELEASE_DAY + timedelta(days=(i * 7) % 40)
            prior = 1 if (i % 5) == 0 else 0
            reviews.append(make_review(i, score, day, prior=prior))
            i += 1
    return make_corpus(reviews, source="tableA1-fixture")


@pytest.fixture(scope="session")
def a1_corpus() -> Corpus:
    return table_a1_corpus()


# Hand-labeled fixture: every body was checked manually against all four
# shipped vocabularies; the expected label sets are frozen here and also
# cross-checked against a regex oracle in the tests that use them.
LABELED_BODIES: list[tuple[str, frozenset[str]]] = [
    ("The political agenda of this studio ruined what could have been a masterpiece for everyone.", frozenset("P")),
    ("An apolitical review from me: the shooting felt smooth and the pacing was tight throughout.", frozenset()),
    ("sjw propaganda everywhere, they lecture us instead of making something worth playing.", frozenset("P")),
    ("This woke nonsense gets a zero from me, the developers should be ashamed of themselves.", frozenset("P")),
    ("Typical conservative outrage bait. I found the experience moving and honest from start to finish.", frozenset("P")),
    ("The gay romance felt natural and earned, unlike anything else in this medium lately.", frozenset("Q")),
    ("Great lgbt representation matters and this delivers it without making a big deal of it.", frozenset("Q")),
    ("People crying about gender themes should touch grass, it is twenty twenty for crying out loud.", frozenset("Q")),
    ("The kissing scene between the two women was handled with unexpected tenderness and care.", frozenset("Q")),
    ("A same sex relationship as the emotional core is a bold move and it pays off beautifully.", frozenset("Q")),
    ("Ignore the 0 reviews, they come from trolls review bombing this platform out of spite.", frozenset("M")),
    ("The critics were right for once, but the user score tells a different story entirely.", frozenset("M")),
    ("Metacritic should remove the obvious fake reviews, this bombing campaign is embarrassing.", frozenset("M")),
    ("Like the last jedi all over again, a loud minority pretending to speak for everybody.", frozenset("M")),
    ("Just like the star wars discourse, angry mobs decided the verdict before release day.", frozenset("M")),
    ("Every biased outlet praised it, yet the honest folks down here seem to disagree strongly.", frozenset("M")),
    ("Ellie deserved better but the gameplay is responsive and the graphics push the hardware.", frozenset("T")),
    ("Joel's arc concluded with grace, and the music swells at exactly the right moments.", frozenset("T")),
    ("The storytelling is masterful even when the plot takes risks that not everyone will enjoy.", frozenset("T")),
    ("Several cutscenes drag on and the framerate dips on the older console models sometimes.", frozenset("T")),
    ("Too many glitches at launch although the developers patched the worst ones fairly quickly.", frozenset("T")),
    ("The political messaging drowned out what the gameplay was quietly doing so well underneath.", frozenset("PT")),
    ("Trolls keep downvoting every positive comment, while Ellie's story deserves a fair shake.", frozenset("MT")),
    ("The woke agenda infected even the combat design, which feels preachy rather than playable.", frozenset("PT")),
    ("Queer stories matter, and the voice acting brings every character to life convincingly.", frozenset("QT")),
    ("Morally bankrupt journalists scored this ten out of ten, wake up people, it is pure trash.", frozenset("PM")),
    ("The trump era culture war leaks into the review section and honestly both sides sound unhinged.", frozenset("P")),
    ("Homophobic review bombing at its finest, look at the score distribution and despair, folks.", frozenset("QM")),
    ("As a streamer I watched chat spam hate, yet the atmosphere in the late chapters is stunning.", frozenset("MT")),
    ("Boring walking sections, shallow puzzles, and a villain with no believable motivation at all.", frozenset("T")),
    ("I bought it on day one and refunded it on day two, which says everything you need to know.", frozenset()),
    ("A solid nine from me, would have been a ten if the pacing in the middle did not sag so much.", frozenset()),
    ("My whole family finished it over the weekend and we argued about the ending for hours after.", frozenset()),
    ("Waited two years for this and it still managed to exceed every expectation I walked in with.", frozenset()),
    ("The second act drags, the enemies repeat, and the checkpoints are placed far too sparsely.", frozenset()),
    ("The gender politics debate around this release buries the fact that the gunplay feels weighty.", frozenset("PQ")),
    ("Propaganda, plain and simple, with a hulking caricature shoved in to tick a diversity box.", frozenset("PQ")),
    ("Taboo themes handled like a daytime soap, but the flashback structure works surprisingly well.", frozenset("QT")),
    ("The 0 brigade strikes again, dragging a technically stunning experience below a five average.", frozenset("MT")),
    ("Politics, gay rights lectures, score manipulation, broken cutscenes, this release has it all.", frozenset("PQMT")),
]


def labeled_fixture_corpus() -> Corpus:
    reviews = []
    for i, (body, _) in enumerate(LABELED_BODIES):
        assert len(body) >= 75, f"fixture body {i} too short ({len(body)})"
        day = RELEASE_DAY + timedelta(days=i % 5)
        reviews.append(make_review(i, score=(i * 3) % 11, day=day, body=body))
    return make_corpus(reviews, source="labeled-fixture")


@pytest.fixture()
def labeled_corpus() -> Corpus:
    return labeled_fixture_corpus()


def expected_assignments() -> dict[str, frozenset[str]]:
    return {f"r{i:06d}": labels for i, (_, labels) in enumerate(LABELED_BODIES)}
