"""The 20-joint skeleton layout.

Skeleton files store one joint per row; the row order inside a frame is
exactly the integer order of :class:`Joint` below.  This table is the
single place where the row-to-joint mapping is defined.
"""

from enum import IntEnum


class Joint(IntEnum):
    Head = 0
    Neck = 1
    Torso = 2
    Stomach = 3
    LeftShoulder = 4
    RightShoulder = 5
    LeftElbow = 6
    RightElbow = 7
    LeftWrist = 8
    RightWrist = 9
    LeftHand = 10
    RightHand = 11
    LeftHip = 12
    RightHip = 13
    LeftKnee = 14
    RightKnee = 15
    LeftAnkle = 16
    RightAnkle = 17
    LeftFoot = 18
    RightFoot = 19


NUM_JOINTS = 20


def parse_joint(name: str) -> Joint:
    """Look up a joint by name, tolerating spaces ("Left Wrist")."""
    try:
        return Joint[name.replace(" ", "").replace("_", "")]
    except KeyError:
        raise KeyError(f"unknown joint name: {name!r}") from None
