"""Kill analysis, vanilla and representative-propagated mutation testing.

Two kill semantics coexist and are computed in one pass per mutant:

* label-kill counts: |killingLabels(mutant)| where a point kills a mutant iff
  the original predicts the point's label correctly and the mutant does not.
  The mutation score is sum(counts) / (|M| * |L|).
* classical killed/survived: a mutant survives iff its predicted class
  matches the original's on every test point (class-level match; float-exact
  softmax comparison would leave no survivors).

Mutants whose outputs go non-finite on a point are treated as mispredicting
that point (an exploded mutant is maximally different) and the event is
logged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset
from .errors import UndefinedScoreError, ValidationError
from .model import FcnnClassifier, forward, predictions_with_flags
from .mutants import MutantSet
from .util import phase_timer

log = logging.getLogger(__name__)

TESTED = "tested"
PROPAGATED = "propagated"
UNTESTED = "untested"


@dataclass(frozen=True)
class MutantVerdict:
    mutant_id: int
    killing_count: int | None  # |killingLabels|; None when untested
    killed: bool | None  # classical reading: outputs differ somewhere
    provenance: str  # tested | propagated | untested
    representative_id: int | None = None

    def __post_init__(self):
        if self.provenance == PROPAGATED and self.representative_id is None:
            raise ValidationError("propagated verdicts must cite a representative")

    @property
    def killed_by_count(self) -> bool | None:
        """Boolean form of the scoring semantics: at least one killing label."""
        return None if self.killing_count is None else self.killing_count >= 1


@dataclass
class TimingRecord:
    """Wall-clock seconds per phase plus the tested-mutant count."""

    phases: dict[str, float] = field(default_factory=dict)
    tested_count: int = 0

    @property
    def total_seconds(self) -> float:
        return sum(self.phases.values())


@dataclass
class VerdictTable:
    verdicts: dict[int, MutantVerdict]
    timing: TimingRecord
    mode: str
    labels: tuple[int, ...]  # label set of the dataset actually used

    def verdict(self, mutant_id: int) -> MutantVerdict:
        return self.verdicts[mutant_id]

    def tested_ids(self) -> list[int]:
        return sorted(
            m for m, v in self.verdicts.items() if v.provenance == TESTED
        )

    def counts(self) -> dict[int, int]:
        return {
            m: v.killing_count
            for m, v in sorted(self.verdicts.items())
            if v.killing_count is not None
        }


def kill(original: FcnnClassifier, mutant: FcnnClassifier, features, label: int) -> bool:
    """True iff the original predicts ``label`` and the mutant does not."""
    if int(np.argmax(forward(original, features))) != int(label):
        return False
    out = predictions_with_flags(mutant, np.asarray(features)[None, :])
    if out[0] == -1:
        log.warning("mutant produced non-finite output; counted as misprediction")
        return True
    return int(out[0]) != int(label)


def _verdict_from_predictions(
    mutant_id: int,
    mutant_preds: np.ndarray,
    original_preds: np.ndarray,
    labels: np.ndarray,
) -> MutantVerdict:
    # -1 rows (non-finite outputs) mispredict everything by policy
    if (mutant_preds == -1).any():
        log.warning(
            "mutant %d produced non-finite outputs on %d points; "
            "counted as mispredictions",
            mutant_id,
            int((mutant_preds == -1).sum()),
        )
    kills = (original_preds == labels) & (mutant_preds != labels)
    count = int(np.unique(labels[kills]).size)
    differs = bool((mutant_preds != original_preds).any())
    return MutantVerdict(mutant_id, count, differs, TESTED)


def killing_labels(
    original: FcnnClassifier, mutant: FcnnClassifier, dataset: LabeledDataset
) -> set[int]:
    """Ground-truth labels of the points that kill the mutant."""
    original_preds = predictions_with_flags(original, dataset.features)
    mutant_preds = predictions_with_flags(mutant, dataset.features)
    kills = (original_preds == dataset.labels) & (mutant_preds != dataset.labels)
    return {int(label) for label in np.unique(dataset.labels[kills])}


def mutation_score(table: VerdictTable) -> float:
    """sum of killingLabels sizes over (scored mutants * label-set size).

    Untested mutants (no count) are excluded from the denominator, so for
    subset techniques the score is over the tested subset.
    """
    counts = table.counts()
    if not counts:
        raise UndefinedScoreError("no scored mutants")
    return sum(counts.values()) / (len(counts) * len(table.labels))


def _test_records(original, records, dataset):
    original_preds = predictions_with_flags(original, dataset.features)
    if (original_preds == -1).any():
        raise ValidationError("original model produced non-finite outputs")
    labels = dataset.labels
    verdicts = {}
    for record in records:
        mutant_preds = predictions_with_flags(record.model, dataset.features)
        verdicts[record.mutant_id] = _verdict_from_predictions(
            record.mutant_id, mutant_preds, original_preds, labels
        )
    return verdicts


def vanilla_test(
    original: FcnnClassifier,
    mutants: MutantSet,
    dataset: LabeledDataset,
    mode: str = "vanilla",
) -> VerdictTable:
    """Exhaustive testing: every mutant against every point of the dataset."""
    phases: dict[str, float] = {}
    with phase_timer(phases, "testing"):
        records = sorted(mutants.mutants, key=lambda m: m.mutant_id)
        verdicts = _test_records(original, records, dataset)
    timing = TimingRecord(phases, tested_count=len(verdicts))
    return VerdictTable(verdicts, timing, mode, tuple(int(l) for l in dataset.labels_present()))


def accelerated_test(
    original: FcnnClassifier,
    mutants: MutantSet,
    dataset: LabeledDataset,
    representatives,
    quarantined=(),
    overhead: dict | None = None,
    mode: str = "spectral",
) -> VerdictTable:
    """Full-dataset testing for representatives only; members inherit verdicts.

    The representative's killing count and classical status are copied
    verbatim to every member of its cluster.  Quarantined mutants bypass
    clustering and are always tested individually.  ``overhead`` phase times
    (sampling, spectra, graph, clustering, search) are folded into the
    timing record so total time reflects the whole accelerated run.
    """
    phases = dict(overhead or {})
    with phase_timer(phases, "testing"):
        tested_ids = sorted(set(representatives.representatives()) | set(quarantined))
        records = [mutants.by_id(m) for m in tested_ids]
        verdicts = _test_records(original, records, dataset)
        for rep, members in representatives.pairs:
            base = verdicts[rep]
            for member in members:
                if member == rep:
                    continue
                verdicts[member] = MutantVerdict(
                    member, base.killing_count, base.killed, PROPAGATED, rep
                )
    timing = TimingRecord(phases, tested_count=len(tested_ids))
    return VerdictTable(verdicts, timing, mode, tuple(int(l) for l in dataset.labels_present()))


def accuracy(model: FcnnClassifier, dataset: LabeledDataset) -> float:
    preds = predictions_with_flags(model, dataset.features)
    return float(np.mean(preds == dataset.labels))
