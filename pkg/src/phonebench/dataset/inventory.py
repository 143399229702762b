"""Phoneme inventory: labels with a vowel/consonant/silence taxonomy."""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..exceptions import InventoryError

VOWEL = "vowel"
CONSONANT = "consonant"
SILENCE = "silence"

CATEGORIES = (VOWEL, CONSONANT, SILENCE)

SUBGROUPS = {
    VOWEL: ("rounded", "unrounded"),
    CONSONANT: ("affricate", "approximant", "fricative", "nasal", "plosive",
                "trill"),
    SILENCE: (),
}

SILENCE_LABEL = "SIL"

_HEADER = ("label", "category", "subgroup")


@dataclass(frozen=True)
class PhonemeClass:
    label: str
    category: str
    subgroup: str | None = None

    def __post_init__(self):
        if not self.label or any(c.isspace() for c in self.label):
            raise InventoryError(f"invalid phoneme label {self.label!r}")
        if self.category not in CATEGORIES:
            raise InventoryError(
                f"{self.label!r}: unknown category {self.category!r}")
        allowed = SUBGROUPS[self.category]
        if self.category == SILENCE:
            if self.subgroup is not None:
                raise InventoryError(
                    f"{self.label!r}: the silence class takes no subgroup")
        elif self.subgroup not in allowed:
            raise InventoryError(
                f"{self.label!r}: subgroup {self.subgroup!r} not one of "
                f"{', '.join(allowed)}")


class PhonemeInventory:
    """Ordered set of phoneme classes.

    Exactly one class must have the ``silence`` category. Class order is
    significant: it fixes row/column order of confusion matrices and report
    tables.
    """

    def __init__(self, classes):
        classes = tuple(classes)
        labels = [c.label for c in classes]
        seen = set()
        for label in labels:
            if label in seen:
                raise InventoryError(f"duplicate label {label!r}")
            seen.add(label)
        n_silence = sum(c.category == SILENCE for c in classes)
        if n_silence != 1:
            raise InventoryError(
                f"inventory needs exactly one silence class, found {n_silence}")
        self.classes = classes
        self._index = {label: i for i, label in enumerate(labels)}

    @classmethod
    def default(cls):
        """The shipped 33-class inventory (10 vowels, 22 consonants, silence)."""
        ref = resources.files("phonebench.dataset") / "data" / "default_inventory.tsv"
        with resources.as_file(ref) as path:
            return cls.from_tsv(path)

    @classmethod
    def from_tsv(cls, path):
        """Read a ``label  category  subgroup`` TSV; ``-`` means no subgroup."""
        path = Path(path)
        classes = []
        header_seen = False
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\r\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                fields = line.split("\t")
                if not header_seen:
                    if tuple(f.strip() for f in fields) != _HEADER:
                        raise InventoryError(
                            "expected header 'label<TAB>category<TAB>subgroup'",
                            line=lineno, path=path)
                    header_seen = True
                    continue
                if len(fields) != 3:
                    raise InventoryError(
                        f"expected 3 tab-separated fields, got {len(fields)}",
                        line=lineno, path=path)
                label, category, subgroup = (f.strip() for f in fields)
                try:
                    classes.append(PhonemeClass(
                        label, category, None if subgroup in ("", "-") else subgroup))
                except InventoryError as exc:
                    raise InventoryError(str(exc), line=lineno, path=path) from None
        if not header_seen:
            raise InventoryError("missing header", path=path)
        try:
            return cls(classes)
        except InventoryError as exc:
            raise InventoryError(str(exc), path=path) from None

    def to_tsv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\t".join(_HEADER) + "\n")
            for c in self.classes:
                fh.write(f"{c.label}\t{c.category}\t{c.subgroup or '-'}\n")

    def subset(self, labels):
        """Inventory restricted to ``labels``, keeping this inventory's order.

        The silence class is always retained.
        """
        wanted = set(labels)
        for label in wanted:
            if label not in self._index:
                raise InventoryError(f"unknown label {label!r}")
        return PhonemeInventory(
            c for c in self.classes if c.label in wanted or c.category == SILENCE)

    @property
    def labels(self):
        return [c.label for c in self.classes]

    @property
    def silence_label(self):
        return next(c.label for c in self.classes if c.category == SILENCE)

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise InventoryError(f"unknown label {label!r}") from None

    def __getitem__(self, label):
        return self.classes[self.index(label)]

    def __contains__(self, label):
        return label in self._index

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __eq__(self, other):
        return isinstance(other, PhonemeInventory) and self.classes == other.classes

    def __repr__(self):
        return f"PhonemeInventory({len(self)} classes)"

    def labels_in(self, category=None, subgroup=None):
        return [c.label for c in self.classes
                if (category is None or c.category == category)
                and (subgroup is None or c.subgroup == subgroup)]

    def subgroups(self):
        """(category, subgroup) pairs that have at least one class, in order."""
        out = []
        for category in (VOWEL, CONSONANT):
            for subgroup in SUBGROUPS[category]:
                if self.labels_in(category, subgroup):
                    out.append((category, subgroup))
        return out
