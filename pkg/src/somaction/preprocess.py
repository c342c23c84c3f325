"""Invariance-producing preprocessing and motion dynamics.

Per-frame maps: an ego-centered coordinate transform (removes actor
position and orientation about the vertical axis), a trunk-length scaling
(removes distance to the camera), and an attention reduction to a subset
of joints.  Sequence maps: first/second finite differences and channel
merging with per-frame unit normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ChannelMismatch, DegenerateBasis, TooShort, UnknownClass, ZeroReference
from .joints import Joint, parse_joint

WORLD_UP = np.array([0.0, 1.0, 0.0])
_EPS = 1e-12


def ego_basis(frame: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Body-anchored orthonormal basis from the Stomach and the two Hips.

    Returns (origin, axes) where axes rows are the lateral, vertical and
    depth directions (right handed).  The vertical axis is world up, the
    lateral axis is the hip line with its vertical component removed, so
    the basis is invariant to translation and to rotation about world up.
    """
    origin = frame[Joint.Stomach]
    hip = frame[Joint.RightHip] - frame[Joint.LeftHip]
    if np.linalg.norm(hip) < _EPS:
        raise DegenerateBasis("hip joints coincide")
    lateral = hip - np.dot(hip, WORLD_UP) * WORLD_UP
    n = np.linalg.norm(lateral)
    if n < _EPS:
        raise DegenerateBasis("hip line is vertical")
    lateral = lateral / n
    depth = np.cross(lateral, WORLD_UP)
    return origin, np.vstack([lateral, WORLD_UP, depth])


def ego_transform(frame: np.ndarray) -> np.ndarray:
    """Express all 20 joints in the ego-centered basis of this frame."""
    origin, axes = ego_basis(frame)
    return (frame - origin) @ axes.T


def scale_frame(frame: np.ndarray, trunk_length: float = 1.0) -> np.ndarray:
    """Scale all joint vectors so the Neck-Stomach distance equals trunk_length."""
    ref = np.linalg.norm(frame[Joint.Neck] - frame[Joint.Stomach])
    if ref < _EPS:
        raise ZeroReference("Neck and Stomach coincide")
    return frame * (trunk_length / ref)


@dataclass
class AttentionMask:
    """Joint subset(s) forming the focus of attention.

    Either a single global subset, or one subset per action class.  When
    per-class subsets are used they must all have the same size so the
    feature dimension is uniform.
    """

    joints: tuple[Joint, ...] | None = None
    per_class: dict[str, tuple[Joint, ...]] | None = None

    def __post_init__(self):
        if (self.joints is None) == (self.per_class is None):
            raise UnknownClass("exactly one of joints / per_class must be set")
        if self.joints is not None and not self.joints:
            raise UnknownClass("empty attention mask")
        if self.per_class is not None:
            sizes = {len(v) for v in self.per_class.values()}
            if not self.per_class or 0 in sizes:
                raise UnknownClass("empty attention mask")
            if len(sizes) != 1:
                raise UnknownClass(
                    f"per-class masks must share one size, got sizes {sorted(sizes)}")

    @classmethod
    def from_names(cls, names=None, per_class=None) -> "AttentionMask":
        conv = lambda seq: tuple(parse_joint(n) for n in seq)
        return cls(joints=conv(names) if names is not None else None,
                   per_class={k: conv(v) for k, v in per_class.items()}
                   if per_class is not None else None)

    def resolve(self, class_hint: str | None = None) -> tuple[Joint, ...]:
        """Joint list for a class, in fixed Joint-index order."""
        if self.joints is not None:
            sel = self.joints
        else:
            if class_hint is None:
                raise UnknownClass(
                    "per-class attention mask needs a class hint")
            if class_hint not in self.per_class:
                raise UnknownClass(f"no attention mask for class {class_hint!r}")
            sel = self.per_class[class_hint]
        return tuple(sorted(set(sel)))

    @property
    def size(self) -> int:
        if self.joints is not None:
            return len(set(self.joints))
        return len(set(next(iter(self.per_class.values()))))


FULL_MASK = AttentionMask(joints=tuple(Joint))


@dataclass
class FeatureSequence:
    """Per-frame feature vectors plus the channel descriptor."""

    data: np.ndarray                 # (N, D)
    channels: tuple[str, ...]        # subset of ('pos', 'vel', 'acc')
    joints: tuple[Joint, ...]        # attended joints, ascending index

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def apply_attention(frames: np.ndarray, mask: AttentionMask,
                    class_hint: str | None = None) -> FeatureSequence:
    """Reduce (T, 20, 3) frames to the attended joints, D = 3 * |mask|."""
    sel = mask.resolve(class_hint)
    idx = [int(j) for j in sel]
    data = frames[:, idx, :].reshape(frames.shape[0], 3 * len(idx))
    return FeatureSequence(np.ascontiguousarray(data), ("pos",), sel)


_DERIV = {"pos": "vel", "vel": "acc"}


def first_order(seq: FeatureSequence) -> FeatureSequence:
    """Consecutive differences; length N-1."""
    if len(seq) < 2:
        raise TooShort(f"need >= 2 frames, got {len(seq)}")
    chan = tuple(_DERIV.get(c, c + "'") for c in seq.channels)
    return FeatureSequence(np.diff(seq.data, axis=0), chan, seq.joints)


def second_order(seq: FeatureSequence) -> FeatureSequence:
    """Differences of differences; length N-2."""
    if len(seq) < 3:
        raise TooShort(f"need >= 3 frames, got {len(seq)}")
    return first_order(first_order(seq))


def _unit_rows(a: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=1, keepdims=True)
    # zero rows stay zero rather than blowing up
    return np.where(norms > _EPS, a / np.where(norms > _EPS, norms, 1.0), a)


def _concat(parts: list[FeatureSequence]) -> FeatureSequence:
    if len(parts) == 1:
        return parts[0]
    joints = parts[0].joints
    for p in parts[1:]:
        if p.joints != joints:
            raise ChannelMismatch("channels attend different joint sets")
    n = min(len(p) for p in parts)
    if n == 0:
        raise TooShort("a channel is empty")
    data = np.hstack([_unit_rows(p.data[:n]) for p in parts])
    chan = sum((p.channels for p in parts), ())
    return FeatureSequence(data, chan, joints)


def merge(position: FeatureSequence, velocity: FeatureSequence | None = None,
          acceleration: FeatureSequence | None = None) -> FeatureSequence:
    """Concatenate channels per frame, each normalized to a unit vector.

    Sequences are truncated to the shortest common length so every output
    frame carries temporally consistent channels.  Position alone passes
    through unchanged.
    """
    return _concat([p for p in (position, velocity, acceleration)
                    if p is not None])


def preprocess_sample(frames: np.ndarray, mask: AttentionMask,
                      channels: tuple[str, ...] = ("pos",),
                      trunk_length: float = 1.0,
                      class_hint: str | None = None) -> FeatureSequence:
    """Full preprocessing chain: ego transform, scaling, attention, dynamics.

    `channels` is any nonempty subset of ('pos', 'vel', 'acc'); single
    channels (e.g. velocity only) are allowed for ablation runs.
    """
    unknown = set(channels) - {"pos", "vel", "acc"}
    if unknown or not channels:
        raise ChannelMismatch(f"bad channel selection {channels}")
    out = np.empty_like(frames)
    for t in range(frames.shape[0]):
        out[t] = scale_frame(ego_transform(frames[t]), trunk_length)
    pos = apply_attention(out, mask, class_hint)
    parts = []
    if "pos" in channels:
        parts.append(pos)
    if "vel" in channels:
        parts.append(first_order(pos))
    if "acc" in channels:
        parts.append(second_order(pos))
    return _concat(parts)
