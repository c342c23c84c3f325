import numpy as np
import pytest

from somaction.dataset import (ActionSample, Corpus, generate_synthetic,
                               load_corpus, parse_skeleton_file, save_corpus,
                               select_by_manifest, serialize_sample,
                               split_dataset, synthetic_trajectory,
                               write_split_manifest)
from somaction.errors import (DegenerateSplit, EmptyFile, InvalidSpec,
                              MalformedFile)


def make_file(n_frames, row="0 0 0 1", header=True):
    lines = [f"{n_frames} 20 3"] if header else []
    lines += [row] * (n_frames * 20)
    return "\n".join(lines)


class TestParse:
    def test_zero_case(self):
        sample = parse_skeleton_file(make_file(3, header=False), "walk")
        assert sample.n_frames == 3
        assert np.all(sample.frames == 0.0)
        assert np.all(sample.confidence == 1.0)

    def test_truncated_frame(self):
        data = "\n".join(["0 0 0 1"] * 59)
        with pytest.raises(MalformedFile):
            parse_skeleton_file(data, "walk")

    def test_empty(self):
        with pytest.raises(EmptyFile):
            parse_skeleton_file("", "walk")
        with pytest.raises(EmptyFile):
            parse_skeleton_file("  \n \n", "walk")

    def test_non_numeric(self):
        data = "\n".join(["0 0 0 1"] * 19 + ["0 zero 0 1"])
        with pytest.raises(MalformedFile):
            parse_skeleton_file(data, "walk")

    def test_wrong_columns(self):
        data = "\n".join(["0 0 0"] * 20)
        with pytest.raises(MalformedFile):
            parse_skeleton_file(data, "walk")

    def test_header_mismatch(self):
        with pytest.raises(MalformedFile):
            parse_skeleton_file("5 20 3\n" + "\n".join(["0 0 0 1"] * 20), "walk")
        with pytest.raises(MalformedFile):
            parse_skeleton_file("1 19 3\n" + "\n".join(["0 0 0 1"] * 19), "walk")

    def test_hand_written_against_line_reader(self):
        # independent oracle: read the fixture line by line without the parser
        rows = []
        for f in range(2):
            rows.append(f"1 2 {3 + f} 0.5")
            rows += ["0.1 -0.2 0.3 1"] * 19
        text = "\n".join(rows)

        oracle = []
        for ln in text.splitlines():
            oracle.append([float(t) for t in ln.split()])
        oracle = np.array(oracle).reshape(2, 20, 4)

        sample = parse_skeleton_file(text, "wave", subject=3, event=1)
        assert sample.frames[0, 0].tolist() == [1.0, 2.0, 3.0]
        assert sample.frames[1, 0].tolist() == [1.0, 2.0, 4.0]
        np.testing.assert_array_equal(sample.frames, oracle[:, :, :3])
        np.testing.assert_array_equal(sample.confidence, oracle[:, :, 3])
        assert sample.sample_id == "wave/3_1"

    def test_round_trip(self, rng):
        frames = rng.normal(size=(4, 20, 3))
        conf = rng.uniform(0, 1, (4, 20))
        sample = ActionSample("jump", 2, 1, frames, conf)
        back = parse_skeleton_file(serialize_sample(sample), "jump", 2, 1)
        np.testing.assert_array_equal(back.frames, frames)
        np.testing.assert_array_equal(back.confidence, conf)


def balanced_corpus(counts):
    classes = [f"a{i}" for i in range(len(counts))]
    samples = []
    for cls, n in zip(classes, counts):
        for s in range(n):
            samples.append(ActionSample(cls, s, 0, np.zeros((3, 20, 3))))
    return Corpus(samples, classes)


class TestSplit:
    def test_partition(self):
        corpus = balanced_corpus([10, 10, 10])
        train, test = split_dataset(corpus, 0.8, seed=0)
        ids = lambda c: {s.sample_id for s in c.samples}
        assert ids(train) | ids(test) == ids(corpus)
        assert ids(train) & ids(test) == set()

    def test_stratified_counts_msr_scale(self):
        # 276 samples over 10 classes at fraction 0.8
        corpus = balanced_corpus([28] * 6 + [27] * 4)
        train, test = split_dataset(corpus, 0.8, seed=3)
        assert len(train) + len(test) == 276
        assert abs(len(train) - 221) <= 2
        for cls in corpus.classes:
            n = sum(1 for s in corpus.samples if s.label == cls)
            k = sum(1 for s in train.samples if s.label == cls)
            assert k == int(np.floor(0.8 * n + 0.5))

    def test_determinism(self):
        corpus = balanced_corpus([10])
        a = split_dataset(corpus, 0.5, seed=7)
        b = split_dataset(corpus, 0.5, seed=7)
        assert [s.sample_id for s in a[0].samples] == \
               [s.sample_id for s in b[0].samples]
        assert [s.sample_id for s in a[1].samples] == \
               [s.sample_id for s in b[1].samples]

    def test_degenerate(self):
        # round(0.9 * 4) = 4 leaves an empty test set
        with pytest.raises(DegenerateSplit):
            split_dataset(balanced_corpus([4]), 0.9, seed=0)
        with pytest.raises(DegenerateSplit):
            split_dataset(balanced_corpus([3]), 0.1, seed=0)
        with pytest.raises(DegenerateSplit):
            split_dataset(Corpus([], []), 0.5, seed=0)

    def test_bad_fraction(self):
        with pytest.raises(InvalidSpec):
            split_dataset(balanced_corpus([4]), 1.0, seed=0)


class TestManifest:
    def test_round_trip(self, tmp_path):
        corpus = balanced_corpus([5, 5])
        train, test = split_dataset(corpus, 0.6, seed=1)
        path = tmp_path / "split.txt"
        write_split_manifest(test, path)
        again = select_by_manifest(corpus, path)
        assert [s.sample_id for s in again.samples] == \
               [s.sample_id for s in test.samples]

    def test_unknown_id(self, tmp_path):
        path = tmp_path / "split.txt"
        path.write_text("nope/0_0\n")
        with pytest.raises(MalformedFile):
            select_by_manifest(balanced_corpus([2]), path)


class TestSynthetic:
    def test_determinism_byte_identical(self):
        a = generate_synthetic(2, 1, (10, 12), noise=0.0, seed=0)
        b = generate_synthetic(2, 1, (10, 12), noise=0.0, seed=0)
        assert [serialize_sample(s) for s in a.samples] == \
               [serialize_sample(s) for s in b.samples]
        c = generate_synthetic(2, 1, (10, 12), noise=0.05, seed=0)
        d = generate_synthetic(2, 1, (10, 12), noise=0.05, seed=0)
        assert [serialize_sample(s) for s in c.samples] == \
               [serialize_sample(s) for s in d.samples]

    def test_counts_balanced(self):
        corpus = generate_synthetic(5, 30, (10, 20), noise=0.01, seed=1)
        assert len(corpus) == 150
        by = corpus.by_class()
        assert all(len(v) == 30 for v in by.values())

    def test_invalid_spec(self):
        with pytest.raises(InvalidSpec):
            generate_synthetic(1, 10)
        with pytest.raises(InvalidSpec):
            generate_synthetic(2, 0)
        with pytest.raises(InvalidSpec):
            generate_synthetic(2, 1, (2, 10))
        with pytest.raises(InvalidSpec):
            generate_synthetic(2, 1, (10, 5))
        with pytest.raises(InvalidSpec):
            generate_synthetic(2, 1, noise=-0.1)

    def test_noise_free_path_is_frame_count_independent(self):
        # nested sampling grids: 2F-1 frames contain the F-frame points
        for c in range(3):
            coarse = synthetic_trajectory(c, 3, 15)
            fine = synthetic_trajectory(c, 3, 29)
            assert np.abs(coarse - fine[::2]).max() < 1e-9

    def test_class_purity(self):
        # inter-class minimum trajectory distance exceeds intra-class maximum
        n_cls, frames = 3, (12, 24)
        corpus = generate_synthetic(n_cls, 4, frames, noise=0.0, seed=2)

        def resampled(sample, n=50):
            # parameter-aligned resampling per coordinate (brute force)
            t = np.linspace(0, 1, sample.n_frames)
            tq = np.linspace(0, 1, n)
            flat = sample.frames.reshape(sample.n_frames, -1)
            return np.stack([np.interp(tq, t, flat[:, k])
                             for k in range(flat.shape[1])], axis=1)

        vecs = [(s.label, resampled(s)) for s in corpus.samples]
        intra, inter = [], []
        for i, (la, va) in enumerate(vecs):
            for lb, vb in vecs[i + 1:]:
                d = np.linalg.norm(va - vb)
                (intra if la == lb else inter).append(d)
        assert min(inter) > max(intra)

    def test_speed_variant_shares_spatial_path(self):
        base = synthetic_trajectory(0, 3, 200, speed_variant=True)
        for c in (1, 2):
            other = synthetic_trajectory(c, 3, 200, speed_variant=True)
            # same curve support: every frame of one lies on the other's path
            d = np.linalg.norm(base.reshape(200, 1, 60)
                               - other.reshape(1, 200, 60), axis=2)
            assert d.min(axis=1).max() < 0.05


class TestCorpusIO:
    def test_save_load_round_trip(self, tmp_path):
        corpus = generate_synthetic(2, 3, (5, 8), noise=0.01, seed=4)
        save_corpus(corpus, tmp_path)
        back = load_corpus(tmp_path)
        assert back.classes == corpus.classes
        assert len(back) == len(corpus)
        orig = {s.sample_id: s for s in corpus.samples}
        for s in back.samples:
            np.testing.assert_array_equal(s.frames, orig[s.sample_id].frames)

    def test_label_not_in_table(self):
        with pytest.raises(InvalidSpec):
            Corpus([ActionSample("x", 0, 0, np.zeros((3, 20, 3)))], ["y"])
