import numpy as np
import pytest

from somaction import pipeline as pl
from somaction.config import PipelineConfig, SomConfig
from somaction.dataset import generate_synthetic, split_dataset

MOVING = ("LeftWrist", "RightWrist", "LeftElbow", "RightElbow",
          "LeftAnkle", "RightAnkle")


def small_config(seed=0, channels=("pos",), **kw):
    return PipelineConfig(
        seed=seed, channels=channels, attention_joints=MOVING,
        layer1=SomConfig(rows=12, cols=12, epochs=10),
        layer2=SomConfig(rows=10, cols=10, epochs=30), **kw)


@pytest.fixture(scope="session")
def synth_split():
    corpus = generate_synthetic(3, 12, (15, 30), noise=0.01, seed=0)
    return split_dataset(corpus, 0.75, seed=0)


@pytest.fixture(scope="session")
def trained(synth_split):
    train, _ = synth_split
    return pl.train_system(train, small_config())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
