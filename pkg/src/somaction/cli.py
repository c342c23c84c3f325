"""Command line interface.

Typical round trip:

    somaction synth --out data/ --classes 5 --samples 30 --noise 0.01
    somaction train --data-root data/ --model run/model.som --out-dir run/
    somaction eval --model run/model.som --data-root data/ \
        --manifest run/test_split.txt --out-dir run/
    somaction region-hist --model run/model.som --data-root data/
    somaction classify --model run/model.som data/class00/0_0.txt
"""

from __future__ import annotations

from pathlib import Path

import click
import numpy as np

from . import pipeline as pl
from . import som
from .config import PipelineConfig, load_config
from .dataset import (generate_synthetic, load_corpus, parse_skeleton_file,
                      save_corpus, select_by_manifest, split_dataset,
                      write_split_manifest)
from .trace import extract_trace

ATTENTION_PROFILES = {
    "full": None,
    "left-arm": ("LeftShoulder", "LeftElbow", "LeftWrist"),
    "arms": ("LeftElbow", "LeftWrist", "RightElbow", "RightWrist"),
    "legs": ("LeftKnee", "LeftAnkle", "RightKnee", "RightAnkle"),
    "limbs": ("LeftWrist", "RightWrist", "LeftAnkle", "RightAnkle"),
    "moving": ("LeftWrist", "RightWrist", "LeftElbow", "RightElbow",
               "LeftAnkle", "RightAnkle"),
}


def _resolve_config(config_path, seed, channels, attention) -> PipelineConfig:
    cfg = load_config(config_path) if config_path else PipelineConfig()
    if seed is not None:
        cfg.seed = seed
    if channels:
        cfg.channels = tuple(channels.split(","))
    if attention:
        if attention not in ATTENTION_PROFILES:
            raise click.BadParameter(
                f"unknown attention profile {attention!r}; "
                f"choose from {sorted(ATTENTION_PROFILES)}")
        cfg.attention_joints = ATTENTION_PROFILES[attention]
    return cfg


def write_pgm(values: np.ndarray, path: Path) -> None:
    """Write a 2D array as an ASCII PGM image.

    An affine contrast stretch maps min..max to 0..255; display only, the
    underlying values go to the CSV exports untouched.
    """
    lo, hi = float(values.min()), float(values.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pix = np.round((values - lo) * scale).astype(int)
    lines = [f"P2\n{values.shape[1]} {values.shape[0]}\n255"]
    for row in pix:
        lines.append(" ".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


@click.group()
def main():
    """Hierarchical SOM action recognition."""


@main.command()
@click.option("--out", type=click.Path(), required=True)
@click.option("--classes", "n_classes", default=5, show_default=True)
@click.option("--samples", "samples_per_class", default=30, show_default=True)
@click.option("--frames", default="20:40", show_default=True,
              help="frame count range LO:HI")
@click.option("--noise", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--speed-variant", is_flag=True,
              help="classes share one spatial path and differ only in speed profile")
def synth(out, n_classes, samples_per_class, frames, noise, seed, speed_variant):
    """Generate a synthetic skeleton corpus."""
    lo, hi = (int(v) for v in frames.split(":"))
    corpus = generate_synthetic(n_classes, samples_per_class, (lo, hi),
                                noise, seed, speed_variant)
    save_corpus(corpus, out)
    click.echo(f"wrote {len(corpus)} samples, {n_classes} classes to {out}")


@main.command()
@click.option("--data-root", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--out-dir", type=click.Path(), default=None,
              help="where split manifests go (default: model directory)")
@click.option("--seed", type=int, default=None)
@click.option("--channels", default=None, help="e.g. pos,vel,acc")
@click.option("--attention", default=None,
              help=f"profile name: {', '.join(sorted(ATTENTION_PROFILES))}")
@click.option("--train-fraction", type=float, default=None)
def train(data_root, config_path, model_path, out_dir, seed, channels,
          attention, train_fraction):
    """Split a corpus, train the full system, save model and manifests."""
    cfg = _resolve_config(config_path, seed, channels, attention)
    if train_fraction is not None:
        cfg.split_fraction = train_fraction
    corpus = load_corpus(data_root)
    tr, te = split_dataset(corpus, cfg.split_fraction, cfg.seed)
    out_dir = Path(out_dir) if out_dir else Path(model_path).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    write_split_manifest(tr, out_dir / "train_split.txt")
    write_split_manifest(te, out_dir / "test_split.txt")
    model = pl.train_system(tr, cfg)
    pl.save_model(model, model_path)
    click.echo(f"trained on {len(tr)} samples ({som.BACKEND} backend), "
               f"model -> {model_path}")


@main.command("eval")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data-root", type=click.Path(exists=True), required=True)
@click.option("--manifest", type=click.Path(exists=True), default=None,
              help="evaluate only the samples listed here (e.g. test_split.txt)")
@click.option("--out-dir", type=click.Path(), default=None,
              help="also write confusion/accuracy CSVs here")
def eval_cmd(model_path, data_root, manifest, out_dir):
    """Evaluate a trained model and print the report."""
    model = pl.load_model(model_path)
    corpus = load_corpus(data_root)
    if manifest:
        corpus = select_by_manifest(corpus, manifest)
    report = pl.evaluate(model, corpus)
    click.echo(report.to_text(), nl=False)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "confusion.csv").write_text(report.confusion_csv())
        (out / "per_class_accuracy.csv").write_text(report.per_class_csv())
        click.echo(f"CSV reports -> {out}")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--label", default=None,
              help="class hint (required for per-class attention masks)")
@click.argument("files", nargs=-1, type=click.Path(exists=True), required=True)
def classify(model_path, label, files):
    """Classify skeleton files; prints one `path<TAB>prediction` per line."""
    model = pl.load_model(model_path)
    for f in files:
        sample = parse_skeleton_file(Path(f).read_bytes(), label=label or "?")
        pred = pl.classify(model, sample.frames, class_hint=label)
        click.echo(f"{f}\t{pred}")


@main.command("region-hist")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--data-root", type=click.Path(exists=True), required=True)
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="also write the table as CSV")
def region_hist(model_path, data_root, manifest, out_path):
    """Per-class activation percentages over the 3x3 map regions."""
    model = pl.load_model(model_path)
    corpus = load_corpus(data_root)
    if manifest:
        corpus = select_by_manifest(corpus, manifest)
    hist = pl.region_histogram(model, corpus)
    click.echo(hist.to_text(), nl=False)
    if out_path:
        Path(out_path).write_text(hist.to_csv())


@main.command("export-maps")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--sample", "sample_path", type=click.Path(exists=True), default=None,
              help="skeleton file; exports its layer-2 activation map and trace")
@click.option("--label", default=None)
def export_maps(model_path, out_dir, sample_path, label):
    """Export activation maps (PGM + CSV) and trace dumps (CSV)."""
    model = pl.load_model(model_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def dump(name: str, arr: np.ndarray) -> None:
        write_pgm(arr, out / f"{name}.pgm")
        (out / f"{name}.csv").write_text(
            "\n".join(",".join(f"{v!r}" for v in row) for row in arr) + "\n")

    dump("layer1_weight_norms",
         np.linalg.norm(model.layer1.weights, axis=1).reshape(
             model.layer1.rows, model.layer1.cols))
    if sample_path:
        sample = parse_skeleton_file(Path(sample_path).read_bytes(),
                                     label=label or "?")
        feats = pl._preprocess(model.config, sample.frames, label)
        tr = extract_trace(model.layer1, feats)
        (out / "trace.csv").write_text(
            "frame,i,j\n" + "\n".join(
                f"{t},{int(i)},{int(j)}" for t, (i, j) in enumerate(tr)) + "\n")
        ov = pl.ordered_vector_of(model, sample.frames, label)
        dump("layer2_activity",
             som.activity_map(model.layer2, ov,
                              sigma=model.config.classifier.map_sigma))
    click.echo(f"exports -> {out}")


if __name__ == "__main__":
    main()
