"""Markdown renderers for benchmark reports."""

from decimal import ROUND_HALF_UP, Decimal

from ..classifiers.registry import TITLES
from ..dataset.inventory import CONSONANT, SUBGROUPS, VOWEL
from ..dsp.features import REPRESENTATIONS
from ..exceptions import RenderError

GROUP_TITLES = {"traditional": "Traditional", "autoencoder": "Autoencoder"}
CATEGORY_TITLES = {VOWEL: "All Vowels", CONSONANT: "All Consonants"}
SUBGROUP_TITLES = {
    "rounded": "Rounded Vowels", "unrounded": "Unrounded Vowels",
    "affricate": "Affricates", "approximant": "Approximants",
    "fricative": "Fricatives", "nasal": "Nasals", "plosive": "Plosives",
    "trill": "Trills",
}
TOP_N = 6


def round_half_up(value, places=2):
    """Decimal rounding of the shortest repr, so 0.125 becomes 0.13."""
    quantum = Decimal(1).scaleb(-places)
    return Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)


def format_score(value, places=2):
    return "n/a" if value is None else str(round_half_up(value, places))


def _row(cells):
    return "| " + " | ".join(cells) + " |"


def _rep_info(name):
    spec = REPRESENTATIONS.get(name)
    if spec is None:
        return name, "Other"
    return spec.title, GROUP_TITLES.get(spec.group, spec.group.title())


def render_table1(report):
    """Mean accuracy grid; column bests in bold, the overall best starred."""
    missing = report.missing_cells()
    if missing:
        raise RenderError("report is missing cells: "
                          + ", ".join(f"{r}:{c}" for r, c in missing))
    rounded = {(r, c): round_half_up(report.grid[r][c].mean)
               for r in report.representations for c in report.classifiers}
    col_best = {c: max(rounded[r, c] for r in report.representations)
                for c in report.classifiers}
    top = max(rounded.values())

    width = len(report.classifiers)
    lines = [_row(["Representation"] + [TITLES.get(c, c) for c in report.classifiers]),
             _row(["---"] + ["---:"] * width)]
    current = None
    for r in report.representations:
        title, group = _rep_info(r)
        if group != current:
            lines.append(_row([f"**{group}**"] + [""] * width))
            current = group
        cells = []
        for c in report.classifiers:
            text = str(rounded[r, c])
            if rounded[r, c] == top:
                text += "\\*"
            if rounded[r, c] == col_best[c]:
                text = f"**{text}**"
            cells.append(text)
        lines.append(_row([title] + cells))
    n = len(report.classes)
    lines.append("")
    lines.append(f"Chance baseline: {format_score(report.chance)} (1/{n}). "
                 "Bold marks the best representation per classifier; "
                 "\\* marks the best result overall.")
    return "\n".join(lines) + "\n"


def parse_cell(text):
    representation, sep, classifier = text.partition(":")
    if not sep or not representation or not classifier:
        raise RenderError(f"cell must look like representation:classifier, got {text!r}")
    return representation, classifier


def ranked_phonemes(per_class, exclude=()):
    """(label, accuracy) pairs best first; ties keep class-list order."""
    scored = [(label, acc) for label, acc in per_class.items()
              if acc is not None and label not in exclude]
    order = sorted(range(len(scored)), key=lambda i: (-scored[i][1], i))
    return [scored[i] for i in order]


def render_table2(report, cell=("mfcc-segment", "dense_nn")):
    """Subgroup accuracies plus the six best and six worst phonemes of one cell."""
    if isinstance(cell, str):
        cell = parse_cell(cell)
    representation, classifier = cell
    try:
        result = report.cell(representation, classifier)
    except KeyError:
        raise RenderError(f"report has no cell {representation}:{classifier}") from None
    silence = {report.silence_label} - {None}

    title, _ = _rep_info(representation)
    lines = [f"{TITLES.get(classifier, classifier)} on {title}", "",
             _row(["Phonemes", "Classification Accuracy"]), _row(["---", "---:"]),
             _row(["**Phoneme Subgroups**", ""])]
    groups = result.per_subgroup
    for category in (VOWEL, CONSONANT):
        lines.append(_row([CATEGORY_TITLES[category],
                           format_score(groups.get(category))]))
        for sub in SUBGROUPS[category]:
            lines.append(_row([SUBGROUP_TITLES[sub],
                               format_score(groups.get(f"{category}/{sub}"))]))
    ranked = ranked_phonemes(result.per_class, exclude=silence)
    lowest = sorted(range(len(ranked)), key=lambda i: (ranked[i][1], -i))
    lines.append(_row(["**Highest Phoneme Performances**", ""]))
    lines += [_row([label, format_score(acc)]) for label, acc in ranked[:TOP_N]]
    lines.append(_row(["**Lowest Phoneme Performances**", ""]))
    lines += [_row([ranked[i][0], format_score(ranked[i][1])]) for i in lowest[:TOP_N]]
    return "\n".join(lines) + "\n"
