"""Label algebra for five-class multi-modal fact verification.

A claim/document pair receives one of five verdicts.  Each verdict factors
into a pair of three-way entailment labels, one for the text modality and
one for the image modality:

    Support_Multimodal      -> (T0, I0)   both entailed
    Support_Text            -> (T0, I1)   text entailed, image not
    Insufficient_Multimodal -> (T1, I0)   image entailed, text not
    Insufficient_Text       -> (T1, I1)   neither entailed
    Refute                  -> (T2, I2)   both refuted

Only five of the nine possible (text, image) pairs appear above.  The other
four pairs can still come out of independently trained sub-task classifiers,
so they must be rewritten to valid pairs before a verdict can be assigned.
The rewrite tables are called heuristics here; three are shipped (see
``PROSE_A``, ``TABLE_A``, ``HEURISTIC_B``) and custom ones can be built from
any total mapping of the four invalid pairs to valid pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, NamedTuple


class FactifyLabel(Enum):
    """The five verdict classes, valued by their canonical string form."""

    SUPPORT_MULTIMODAL = "Support_Multimodal"
    SUPPORT_TEXT = "Support_Text"
    INSUFFICIENT_MULTIMODAL = "Insufficient_Multimodal"
    INSUFFICIENT_TEXT = "Insufficient_Text"
    REFUTE = "Refute"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "FactifyLabel":
        """Parse a verdict name, case-insensitively, to its canonical value."""
        key = text.strip().lower()
        for label in cls:
            if label.value.lower() == key:
                return label
        known = ", ".join(label.value for label in cls)
        raise ValueError(f"unknown verdict label {text!r} (expected one of: {known})")


class TextLabel(Enum):
    """Text entailment sub-labels: entailed, not entailed, refuted."""

    T0 = 0
    T1 = 1
    T2 = 2

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> "TextLabel":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown text label {text!r} (expected T0, T1 or T2)") from None


class ImageLabel(Enum):
    """Image entailment sub-labels: entailed, not entailed, refuted."""

    I0 = 0
    I1 = 1
    I2 = 2

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> "ImageLabel":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown image label {text!r} (expected I0, I1 or I2)") from None


class LabelPair(NamedTuple):
    """A (text, image) sub-label pair."""

    text: TextLabel
    image: ImageLabel

    def __str__(self) -> str:
        return f"({self.text}, {self.image})"


_DECOMPOSE: dict[FactifyLabel, LabelPair] = {
    FactifyLabel.SUPPORT_MULTIMODAL: LabelPair(TextLabel.T0, ImageLabel.I0),
    FactifyLabel.SUPPORT_TEXT: LabelPair(TextLabel.T0, ImageLabel.I1),
    FactifyLabel.INSUFFICIENT_MULTIMODAL: LabelPair(TextLabel.T1, ImageLabel.I0),
    FactifyLabel.INSUFFICIENT_TEXT: LabelPair(TextLabel.T1, ImageLabel.I1),
    FactifyLabel.REFUTE: LabelPair(TextLabel.T2, ImageLabel.I2),
}

_COMPOSE: dict[LabelPair, FactifyLabel] = {pair: label for label, pair in _DECOMPOSE.items()}

# The four pairs no verdict maps to, in fixed documented order.
_INVALID_PAIRS: tuple[LabelPair, ...] = (
    LabelPair(TextLabel.T0, ImageLabel.I2),
    LabelPair(TextLabel.T1, ImageLabel.I2),
    LabelPair(TextLabel.T2, ImageLabel.I0),
    LabelPair(TextLabel.T2, ImageLabel.I1),
)


def all_pairs() -> list[LabelPair]:
    """All nine (text, image) pairs, text-major order."""
    return [LabelPair(t, i) for t in TextLabel for i in ImageLabel]


def invalid_pairs() -> list[LabelPair]:
    """The four pairs with no verdict, ordered (T0,I2), (T1,I2), (T2,I0), (T2,I1)."""
    return list(_INVALID_PAIRS)


def decompose(label: FactifyLabel) -> LabelPair:
    """Split a verdict into its (text, image) sub-label pair."""
    return _DECOMPOSE[label]


def compose(pair: LabelPair) -> FactifyLabel | None:
    """Return the verdict for a valid pair, or None for the four invalid pairs."""
    return _COMPOSE.get(pair)


@dataclass(frozen=True)
class Heuristic:
    """A total rewrite of the four invalid pairs to valid pairs.

    ``mapping`` must have exactly the four invalid pairs as keys and only
    valid pairs as values.  Heuristics are plain data so callers can define
    their own; see :func:`heuristic_from_dict`.
    """

    name: str
    mapping: Mapping[LabelPair, LabelPair] = field(hash=False)

    def __post_init__(self) -> None:
        keys = set(self.mapping)
        if keys != set(_INVALID_PAIRS):
            raise ValueError(
                f"heuristic {self.name!r} must map exactly the four invalid pairs, "
                f"got keys {sorted(str(p) for p in keys)}"
            )
        for src, dst in self.mapping.items():
            if dst not in _COMPOSE:
                raise ValueError(
                    f"heuristic {self.name!r} rewrites {src} to invalid pair {dst}"
                )

    def rewrite(self, pair: LabelPair) -> LabelPair:
        """Map an invalid pair to its valid replacement; valid pairs pass through."""
        return self.mapping.get(pair, pair)

    def to_dict(self) -> dict[str, str]:
        """Serialize the rewrite table as {"T0,I2": "T0,I1", ...}."""
        return {
            f"{src.text},{src.image}": f"{dst.text},{dst.image}"
            for src, dst in ((p, self.mapping[p]) for p in _INVALID_PAIRS)
        }


def heuristic_from_dict(name: str, table: Mapping[str, str]) -> Heuristic:
    """Build a custom heuristic from a {"T0,I2": "T0,I1", ...} table."""

    def parse_pair(text: str) -> LabelPair:
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"malformed label pair {text!r} (expected e.g. 'T0,I2')")
        return LabelPair(TextLabel.parse(parts[0]), ImageLabel.parse(parts[1]))

    return Heuristic(name, {parse_pair(k): parse_pair(v) for k, v in table.items()})


# Rewrite derived from the two prose rules: an entailed modality pulls a
# refuted partner up to not-entailed; a refuted modality pulls a not-entailed
# partner down to refuted.
PROSE_A = Heuristic(
    "prose-a",
    {
        LabelPair(TextLabel.T0, ImageLabel.I2): LabelPair(TextLabel.T0, ImageLabel.I1),
        LabelPair(TextLabel.T1, ImageLabel.I2): LabelPair(TextLabel.T2, ImageLabel.I2),
        LabelPair(TextLabel.T2, ImageLabel.I0): LabelPair(TextLabel.T1, ImageLabel.I0),
        LabelPair(TextLabel.T2, ImageLabel.I1): LabelPair(TextLabel.T2, ImageLabel.I2),
    },
)

# The same idea as published in tabular form; its last two rows disagree with
# the prose rules, so it is shipped verbatim as a separate heuristic.
TABLE_A = Heuristic(
    "table-a",
    {
        LabelPair(TextLabel.T0, ImageLabel.I2): LabelPair(TextLabel.T0, ImageLabel.I1),
        LabelPair(TextLabel.T1, ImageLabel.I2): LabelPair(TextLabel.T2, ImageLabel.I2),
        LabelPair(TextLabel.T2, ImageLabel.I0): LabelPair(TextLabel.T2, ImageLabel.I2),
        LabelPair(TextLabel.T2, ImageLabel.I1): LabelPair(TextLabel.T1, ImageLabel.I0),
    },
)

# Post-hoc revision: trust the text classifier and force the image label to
# the same index.
HEURISTIC_B = Heuristic(
    "b",
    {
        LabelPair(TextLabel.T0, ImageLabel.I2): LabelPair(TextLabel.T0, ImageLabel.I0),
        LabelPair(TextLabel.T1, ImageLabel.I2): LabelPair(TextLabel.T1, ImageLabel.I1),
        LabelPair(TextLabel.T2, ImageLabel.I0): LabelPair(TextLabel.T2, ImageLabel.I2),
        LabelPair(TextLabel.T2, ImageLabel.I1): LabelPair(TextLabel.T2, ImageLabel.I2),
    },
)

HEURISTICS: dict[str, Heuristic] = {h.name: h for h in (PROSE_A, TABLE_A, HEURISTIC_B)}

DEFAULT_HEURISTIC = PROSE_A


def get_heuristic(name: str) -> Heuristic:
    """Look up a shipped heuristic by name ("prose-a", "table-a" or "b")."""
    try:
        return HEURISTICS[name]
    except KeyError:
        known = ", ".join(sorted(HEURISTICS))
        raise ValueError(f"unknown heuristic {name!r} (expected one of: {known})") from None


def consolidate(pair: LabelPair, heuristic: Heuristic = DEFAULT_HEURISTIC) -> FactifyLabel:
    """Resolve any (text, image) pair to a verdict.

    Valid pairs compose directly, untouched by the heuristic; invalid pairs
    are first rewritten by the heuristic's table.  Total over all nine pairs.
    """
    label = compose(pair)
    if label is not None:
        return label
    rewritten = heuristic.rewrite(pair)
    label = compose(rewritten)
    assert label is not None  # heuristic validation guarantees a valid pair
    return label

