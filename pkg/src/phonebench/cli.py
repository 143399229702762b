"""``phonebench`` command-line interface.

Exit status is 0 on success, 1 for user or configuration errors and 2 for
internal errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .dataset import Corpus, PhonemeInventory, load_manifest, read_wav
from .dataset.synth import SynthSpec, generate_synthetic_dataset, with_n, write_synthetic_dataset
from .dsp.features import REPRESENTATIONS, FeatureExtractor
from .dsp.io import FeatureMatrix
from .evaluation import BenchmarkReport, render_table1, render_table2, run_benchmark
from .evaluation.benchmark import check_seed
from .exceptions import ConfigError, PhonebenchError
from .neural.autoencoders import (DenseAeArch, LstmAeArch, TrainConfig, load_encoder,
                                  save_autoencoder, segment_corpus, train_autoencoder,
                                  write_loss_curve)
from .neural.external import RandomProjectionEncoder

log = logging.getLogger("phonebench")

AE_ARCHS = ("ae-small", "ae-big", "lstm-ae-small", "lstm-ae-big")
DEFAULT_CELL = "mfcc-segment:dense_nn"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 like every other user error."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def arch_for(name, first_width=2048, lstm_hidden=2048):
    if name not in AE_ARCHS:
        raise ConfigError(f"{name!r} is not an autoencoder; choose from {', '.join(AE_ARCHS)}")
    k = REPRESENTATIONS[name].encoder_dim
    if name.startswith("lstm"):
        return LstmAeArch(bottleneck=k, hidden=lstm_hidden)
    return DenseAeArch(bottleneck=k, first_width=first_width)


def _inventory(path):
    return PhonemeInventory.from_tsv(path) if path else None


def _load_encoder_for(representation, model, external_seed=0):
    spec = REPRESENTATIONS[representation]
    if not spec.needs_encoder:
        return None
    if model is not None:
        return load_encoder(model, representation)
    if spec.algo == "external":
        return RandomProjectionEncoder(seed=external_seed)
    raise ConfigError(f"representation {representation} needs --model")


def _write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# dataset ------------------------------------------------------------------

def cmd_dataset_validate(args):
    inventory = _inventory(args.inventory)
    if args.check_audio:
        corpus = Corpus.load(args.manifest, inventory, args.audio_dir, args.resample)
        annotations = corpus.annotations
        corpus.windows()
    else:
        annotations = load_manifest(args.manifest, inventory)
    inventory = annotations.inventory
    stats = annotations.stats
    print(stats.format())
    missing = [label for label, n in stats.counts.items() if n == 0]
    present = len(inventory) - len(missing)
    line = f"inventory coverage: {present}/{len(inventory)} classes"
    if missing:
        line += f" (missing: {', '.join(missing)})"
    print(line)
    return 0


def cmd_dataset_synth(args):
    spec = SynthSpec.load(args.spec)
    if args.n is not None:
        spec = with_n(spec, args.n)
    seed = check_seed(args.seed)
    audio, annotations = generate_synthetic_dataset(spec, seed)
    write_synthetic_dataset(args.out, audio, annotations)
    print(f"wrote {len(annotations)} annotations in {len(audio)} files to {args.out}")
    return 0


# features -----------------------------------------------------------------

def cmd_features(args):
    if args.repr not in REPRESENTATIONS:
        raise ConfigError(f"unknown representation {args.repr!r}; choose from "
                          + ", ".join(REPRESENTATIONS))
    encoder = _load_encoder_for(args.repr, args.model, args.external_seed)
    corpus = Corpus.load(args.manifest, _inventory(args.inventory), args.audio_dir,
                         args.resample)
    rate = next(iter(corpus.audio.values())).sample_rate
    extractor = FeatureExtractor(args.repr, encoder, rate).fit()
    print(f"representation {args.repr}: d = {extractor.n_features_out_}")
    spec = REPRESENTATIONS[args.repr]
    source = corpus.segments() if spec.mode == "whole-segment" else corpus.windows()
    X = extractor.transform(source)
    FeatureMatrix(X, corpus.labels, args.repr).save(args.out)
    print(f"wrote {X.shape[0]} x {X.shape[1]} features to {args.out}")
    return 0


# autoencoder training -----------------------------------------------------

def _training_audio(args):
    if args.manifest:
        return Corpus.load(args.manifest, _inventory(args.inventory), args.audio_dir,
                           args.resample).audio
    wavs = sorted(Path(args.audio_dir).glob("*.wav"))
    if not wavs:
        raise ConfigError(f"no .wav files in {args.audio_dir}")
    return {w.stem: read_wav(w, resample=args.resample) for w in wavs}


def train_encoder(name, audio, first_width, lstm_hidden, config, max_segments,
                  out_path, curve_path=None):
    arch = arch_for(name, first_width, lstm_hidden)
    segments = segment_corpus(audio, arch.input_dim, config.seed, max_segments)
    log.info("training %s on %d segments (%s)", name, segments.shape[0], arch)

    def progress(epoch, loss):
        log.info("%s epoch %d loss %.6g", name, epoch, loss)

    encoder, net = train_autoencoder(segments, arch, config, progress)
    encoder.name = name
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_autoencoder(out_path, net, arch, encoder.loss_curve)
    if curve_path:
        write_loss_curve(curve_path, encoder.loss_curve)
    return encoder


def cmd_ae_train(args):
    if not args.manifest and not args.audio_dir:
        raise ConfigError("give --manifest or --audio-dir")
    config = TrainConfig(lr=args.lr, batch_size=args.batch_size, epochs=args.epochs,
                         seed=check_seed(args.seed))
    audio = _training_audio(args)
    encoder = train_encoder(args.arch, audio, args.first_width, args.hidden, config,
                            args.max_segments, args.out, args.loss_curve)
    curve = encoder.loss_curve
    print(f"{args.arch}: loss {curve[0]:.6g} -> {curve[-1]:.6g}; "
          f"bottleneck {encoder.bottleneck_dim}; saved {args.out}")
    return 0


# bench / report -----------------------------------------------------------

def build_encoders(cfg, corpus):
    """Encoders for every representation that needs one, training missing AEs."""
    encoders = {}
    ae = cfg.autoencoder
    train_cfg = TrainConfig(lr=ae.learning_rate, batch_size=ae.batch_size,
                            epochs=ae.epochs,
                            seed=cfg.seed if ae.seed is None else ae.seed)
    for name in cfg.representations:
        spec = REPRESENTATIONS[name]
        if not spec.needs_encoder:
            continue
        if name in cfg.models:
            encoders[name] = load_encoder(cfg.models[name], name)
        elif spec.algo == "external":
            encoders[name] = RandomProjectionEncoder(seed=cfg.external_seed)
        else:
            model_dir = cfg.output_dir / "models"
            encoders[name] = train_encoder(
                name, corpus.audio, ae.first_width, ae.lstm_hidden, train_cfg,
                ae.max_segments, model_dir / f"{name}.pbnn",
                model_dir / f"{name}.loss.csv")
    return encoders


def cmd_bench(args):
    cfg = load_config(args.config, args.out)
    resolved = cfg.resolved()
    log.info("resolved config: %s", json.dumps(resolved, sort_keys=True))
    log.info("seed: %d", cfg.seed)
    corpus = Corpus.load(cfg.manifest, cfg.inventory, cfg.audio_dir, cfg.resample)
    encoders = build_encoders(cfg, corpus)
    report = run_benchmark(corpus, list(cfg.representations), cfg.model_specs(),
                           cfg.k, cfg.seed, encoders, log.info)
    report.config = resolved
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    report.save(out / "report.json")
    _write_text(out / "table1.md", render_table1(report))
    rep, clf = DEFAULT_CELL.split(":")
    if rep in report.representations and clf in report.classifiers:
        _write_text(out / "table2.md", render_table2(report, DEFAULT_CELL))
    print(f"wrote {out / 'report.json'}")
    return 0


def cmd_report(args):
    report = BenchmarkReport.load(args.report)
    if args.table == "table1":
        text = render_table1(report)
    else:
        text = render_table2(report, args.cell)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# parser -------------------------------------------------------------------

def _add_corpus_args(p, manifest_required=True):
    p.add_argument("--manifest", required=manifest_required, help="annotation manifest (TSV)")
    p.add_argument("--inventory", help="phoneme inventory TSV (default: built-in 33 classes)")
    p.add_argument("--audio-dir", help="directory holding <audio_id>.wav files")
    p.add_argument("--resample", action="store_true",
                   help="resample audio not at 44.1 kHz instead of rejecting it")


def build_parser():
    parser = _Parser(prog="phonebench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ds = sub.add_parser("dataset", help="validate or synthesize a corpus")
    ds_sub = ds.add_subparsers(dest="action", required=True, parser_class=_Parser)
    v = ds_sub.add_parser("validate", help="print class statistics of a manifest")
    v.add_argument("manifest")
    v.add_argument("--inventory")
    v.add_argument("--audio-dir")
    v.add_argument("--resample", action="store_true")
    v.add_argument("--check-audio", action="store_true",
                   help="also load the audio and cut every window")
    v.set_defaults(func=cmd_dataset_validate)
    s = ds_sub.add_parser("synth", help="write a synthetic corpus")
    s.add_argument("--spec", default="default",
                   help="'default', 'four-class' or a TOML synth spec")
    s.add_argument("--n", type=int, help="number of annotations (overrides the spec)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_dataset_synth)

    f = sub.add_parser("features", help="extract one representation to a feature file")
    f.add_argument("--repr", required=True, help=", ".join(REPRESENTATIONS))
    _add_corpus_args(f)
    f.add_argument("--out", required=True, help="output .csv or .pbft")
    f.add_argument("--model", help="trained encoder (.pbnn) for autoencoder representations")
    f.add_argument("--external-seed", type=int, default=0,
                   help="seed of the stand-in chunk encoder when --model is absent")
    f.set_defaults(func=cmd_features)

    a = sub.add_parser("ae-train", help="train an autoencoder on unlabeled audio")
    a.add_argument("--arch", required=True, choices=AE_ARCHS)
    _add_corpus_args(a, manifest_required=False)
    a.add_argument("--out", required=True, help="output model (.pbnn)")
    a.add_argument("--loss-curve", help="write per-epoch training loss as CSV")
    a.add_argument("--epochs", type=int, default=30)
    a.add_argument("--batch-size", type=int, default=64)
    a.add_argument("--lr", type=float, default=1e-3)
    a.add_argument("--first-width", type=int, default=2048)
    a.add_argument("--hidden", type=int, default=2048, help="LSTM hidden units")
    a.add_argument("--max-segments", type=int, default=20000)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_ae_train)

    b = sub.add_parser("bench", help="run the cross-validated benchmark grid")
    b.add_argument("--config", required=True, help="run config (TOML)")
    b.add_argument("--out", help="output directory (overrides the config)")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("report", help="render a report JSON as Markdown")
    r.add_argument("table", choices=("table1", "table2"))
    r.add_argument("report", help="report.json written by bench")
    r.add_argument("--cell", default=DEFAULT_CELL,
                   help="representation:classifier for table2")
    r.add_argument("--out", help="write to a file instead of stdout")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except (PhonebenchError, OSError) as exc:
        print(f"phonebench: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"phonebench: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
