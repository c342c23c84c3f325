"""Skeleton action corpora: file parsing, splits, synthetic generation.

File format (documented here, used by all fixtures and the CLI):

* plain text, whitespace separated decimals
* optional first line header ``<frames> <joints> <dims>`` (three integers)
* then one joint per row, 4 columns ``x y z confidence``
* 20 consecutive rows form one frame, row order per :class:`somaction.joints.Joint`

Corpora on disk live under ``<root>/<action>/<subject>_<event>.txt``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateSplit, EmptyFile, InvalidSpec, MalformedFile
from .joints import NUM_JOINTS, Joint

_FILE_RE = re.compile(r"^(\d+)_(\d+)\.txt$")


@dataclass
class ActionSample:
    """A labeled variable-length sequence of skeleton frames."""

    label: str
    subject: int
    event: int
    frames: np.ndarray  # (T, 20, 3) float64
    confidence: np.ndarray | None = None  # (T, 20)

    @property
    def sample_id(self) -> str:
        return f"{self.label}/{self.subject}_{self.event}"

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass
class Corpus:
    samples: list[ActionSample]
    classes: list[str]
    provenance: str = ""

    def __post_init__(self):
        known = set(self.classes)
        for s in self.samples:
            if s.label not in known:
                raise InvalidSpec(f"sample label {s.label!r} not in class table")

    def __len__(self) -> int:
        return len(self.samples)

    def by_class(self) -> dict[str, list[ActionSample]]:
        out: dict[str, list[ActionSample]] = {c: [] for c in self.classes}
        for s in self.samples:
            out[s.label].append(s)
        return out


def parse_skeleton_file(data: bytes | str, label: str,
                        subject: int = 0, event: int = 0) -> ActionSample:
    """Parse the text format above into an ActionSample."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [ln for ln in data.splitlines() if ln.strip()]
    if not lines:
        raise EmptyFile("no data rows")

    declared_frames = None
    first = lines[0].split()
    if len(first) == 3:
        try:
            declared_frames, joints, dims = (int(tok) for tok in first)
        except ValueError:
            raise MalformedFile(f"bad header line: {lines[0]!r}") from None
        if joints != NUM_JOINTS or dims != 3:
            raise MalformedFile(
                f"header declares {joints} joints / {dims} dims, expected 20/3")
        lines = lines[1:]

    rows = []
    for ln in lines:
        toks = ln.split()
        if len(toks) != 4:
            raise MalformedFile(f"expected 4 columns, got {len(toks)}: {ln!r}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise MalformedFile(f"non-numeric token in row: {ln!r}") from None

    if not rows:
        raise EmptyFile("header only, no joint rows")
    if len(rows) % NUM_JOINTS != 0:
        raise MalformedFile(
            f"{len(rows)} rows is not a multiple of {NUM_JOINTS} (truncated frame?)")
    n_frames = len(rows) // NUM_JOINTS
    if declared_frames is not None and declared_frames != n_frames:
        raise MalformedFile(
            f"header declares {declared_frames} frames but file holds {n_frames}")

    arr = np.asarray(rows, dtype=np.float64).reshape(n_frames, NUM_JOINTS, 4)
    if not np.isfinite(arr).all():
        raise MalformedFile("non-finite coordinate")
    return ActionSample(label=label, subject=subject, event=event,
                        frames=np.ascontiguousarray(arr[:, :, :3]),
                        confidence=np.ascontiguousarray(arr[:, :, 3]))


def serialize_sample(sample: ActionSample) -> str:
    """Inverse of parse_skeleton_file; round-trips values exactly."""
    t = sample.n_frames
    conf = sample.confidence
    if conf is None:
        conf = np.ones((t, NUM_JOINTS))
    out = [f"{t} {NUM_JOINTS} 3"]
    for f in range(t):
        for j in range(NUM_JOINTS):
            x, y, z = (float(v) for v in sample.frames[f, j])
            out.append(f"{x!r} {y!r} {z!r} {float(conf[f, j])!r}")
    return "\n".join(out) + "\n"


def load_corpus(root: str | Path) -> Corpus:
    """Load ``<root>/<action>/<subject>_<event>.txt`` into a Corpus."""
    root = Path(root)
    classes = sorted(p.name for p in root.iterdir() if p.is_dir())
    if not classes:
        raise EmptyFile(f"no action directories under {root}")
    samples = []
    for action in classes:
        for path in sorted((root / action).iterdir()):
            m = _FILE_RE.match(path.name)
            if not m:
                continue
            samples.append(parse_skeleton_file(
                path.read_bytes(), label=action,
                subject=int(m.group(1)), event=int(m.group(2))))
    return Corpus(samples=samples, classes=classes, provenance=str(root))


def save_corpus(corpus: Corpus, root: str | Path) -> None:
    root = Path(root)
    for s in corpus.samples:
        d = root / s.label
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{s.subject}_{s.event}.txt").write_text(serialize_sample(s))


def split_dataset(corpus: Corpus, train_fraction: float,
                  seed: int) -> tuple[Corpus, Corpus]:
    """Stratified random split; identical seed gives an identical split."""
    if not corpus.samples:
        raise DegenerateSplit("empty corpus")
    if not 0.0 < train_fraction < 1.0:
        raise InvalidSpec(f"train_fraction must be in (0,1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in corpus.classes:
        members = [s for s in corpus.samples if s.label == cls]
        if not members:
            continue
        n = len(members)
        n_train = int(math.floor(train_fraction * n + 0.5))
        if n_train == 0 or n_train == n:
            raise DegenerateSplit(
                f"class {cls!r}: {n} samples at fraction {train_fraction} "
                f"leaves an empty train or test side")
        order = rng.permutation(n)
        train.extend(members[i] for i in order[:n_train])
        test.extend(members[i] for i in order[n_train:])
    tag = f"{corpus.provenance}|split(fraction={train_fraction},seed={seed})"
    return (Corpus(train, list(corpus.classes), tag + "|train"),
            Corpus(test, list(corpus.classes), tag + "|test"))


def write_split_manifest(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text("".join(s.sample_id + "\n" for s in corpus.samples))


def select_by_manifest(corpus: Corpus, path: str | Path) -> Corpus:
    ids = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    by_id = {s.sample_id: s for s in corpus.samples}
    missing = [i for i in ids if i not in by_id]
    if missing:
        raise MalformedFile(f"manifest names unknown samples: {missing[:5]}")
    return Corpus([by_id[i] for i in ids], list(corpus.classes),
                  corpus.provenance + f"|manifest({path})")


# ---------------------------------------------------------------------------
# synthetic corpora
#
# Each class is a parametric trajectory family: a fixed standing pose with a
# set of limb joints swept along class-specific closed curves in the phase
# variable u in [0, 1].  Frames sample u uniformly, so samples of one class
# at different frame counts trace the same spatial path.

BASE_POSE = np.array([
    [0.00, 0.75, 0.00],    # Head
    [0.00, 0.55, 0.00],    # Neck
    [0.00, 0.30, 0.00],    # Torso
    [0.00, 0.00, 0.00],    # Stomach
    [0.20, 0.50, 0.00],    # LeftShoulder
    [-0.20, 0.50, 0.00],   # RightShoulder
    [0.30, 0.25, 0.00],    # LeftElbow
    [-0.30, 0.25, 0.00],   # RightElbow
    [0.35, 0.00, 0.00],    # LeftWrist
    [-0.35, 0.00, 0.00],   # RightWrist
    [0.38, -0.08, 0.00],   # LeftHand
    [-0.38, -0.08, 0.00],  # RightHand
    [0.12, -0.05, 0.00],   # LeftHip
    [-0.12, -0.05, 0.00],  # RightHip
    [0.13, -0.50, 0.00],   # LeftKnee
    [-0.13, -0.50, 0.00],  # RightKnee
    [0.14, -0.90, 0.00],   # LeftAnkle
    [-0.14, -0.90, 0.00],  # RightAnkle
    [0.15, -0.95, 0.08],   # LeftFoot
    [-0.15, -0.95, 0.08],  # RightFoot
])

MOVING_JOINTS = (Joint.LeftWrist, Joint.RightWrist, Joint.LeftElbow,
                 Joint.RightElbow, Joint.LeftAnkle, Joint.RightAnkle)


def _speed_warp(t: np.ndarray, class_index: int, n_classes: int) -> np.ndarray:
    """Monotone phase map with a class-specific dwell (zero-velocity plateau)."""
    if class_index == 0:
        return t
    u_c = class_index / n_classes
    p = 0.2 + 0.6 * u_c
    return np.interp(t, [0.0, p - 0.15, p + 0.15, 1.0], [0.0, u_c, u_c, 1.0])


def synthetic_trajectory(class_index: int, n_classes: int, n_frames: int,
                         speed_variant: bool = False) -> np.ndarray:
    """Noise-free (n_frames, 20, 3) trajectory for one synthetic class.

    In the speed variant every class shares class 0's spatial path and
    differs only in the traversal speed profile (where the dwell sits).
    """
    t = np.linspace(0.0, 1.0, n_frames)
    if speed_variant:
        u = _speed_warp(t, class_index, n_classes)
        c = 0
    else:
        u = t
        c = class_index

    amp = 0.25 + 0.04 * c
    freq = 1 + (c % 3)
    phase = c / n_classes

    pos = np.repeat(BASE_POSE[None, :, :], n_frames, axis=0)
    for k, joint in enumerate(MOVING_JOINTS):
        w = 0.6 + 0.4 * np.cos(2 * np.pi * (k / 6 + c / n_classes))
        ang = 2 * np.pi * (freq * u + phase + k / 6)
        pos[:, joint, 0] += amp * w * np.sin(ang)
        pos[:, joint, 1] += amp * w * np.cos(ang)
        pos[:, joint, 2] += amp * w * 0.5 * np.sin(2 * np.pi * (u + k / 6))
    return pos


def generate_synthetic(n_classes: int, samples_per_class: int,
                       frame_range: tuple[int, int] = (20, 40),
                       noise: float = 0.0, seed: int = 0,
                       speed_variant: bool = False) -> Corpus:
    """Deterministic synthetic corpus; additive noise bounded by `noise`."""
    if n_classes < 2:
        raise InvalidSpec("need at least 2 classes")
    if samples_per_class < 1:
        raise InvalidSpec("need at least 1 sample per class")
    lo, hi = frame_range
    if lo < 3 or hi < lo:
        raise InvalidSpec(f"bad frame range {frame_range} (min must be >= 3)")
    if noise < 0:
        raise InvalidSpec("noise must be nonnegative")

    rng = np.random.default_rng(seed)
    samples = []
    classes = [f"class{c:02d}" for c in range(n_classes)]
    for c in range(n_classes):
        for s in range(samples_per_class):
            n_frames = int(rng.integers(lo, hi + 1))
            pos = synthetic_trajectory(c, n_classes, n_frames, speed_variant)
            if noise > 0:
                pos = pos + rng.uniform(-noise, noise, pos.shape)
            samples.append(ActionSample(label=classes[c], subject=s, event=0,
                                        frames=pos))
    prov = (f"synthetic(classes={n_classes},per_class={samples_per_class},"
            f"frames={lo}-{hi},noise={noise},seed={seed},"
            f"speed_variant={speed_variant})")
    return Corpus(samples=samples, classes=classes, provenance=prov)
