"""Command-line interface for the diarization pipeline.

Exit codes: 0 success, 2 config error, 3 audio error, 4 pipeline error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import audio_io, clustering, features, gmm, metrics, pipeline, plots
from . import segmentation, spectral, synth, vad
from .config import ConfigError, PipelineConfig, load_config

EXIT_CONFIG = 2
EXIT_AUDIO = 3
EXIT_PIPELINE = 4


def _add_common(p):
    p.add_argument("--config", metavar="PATH", help="key = value config file")
    p.add_argument("--output", metavar="PATH", help="primary output file")
    p.add_argument("--dump-dir", metavar="PATH",
                   help="directory for stage CSVs and figures")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker bound (results are identical for any N)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gmmdiar",
        description="GMM-based speaker diarization and evaluation tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diarize", help="diarize a WAV file to RTTM")
    p.add_argument("wav")
    p.add_argument("--auto-threshold", action="store_true",
                   help="pick the cluster threshold from the merge-distance gap")
    _add_common(p)

    p = sub.add_parser("features", help="dump MFCC(+delta) features as CSV")
    p.add_argument("wav")
    p.add_argument("--block", choices=["base", "delta", "delta2", "all"],
                   default="all", help="which coefficient block to emit")
    _add_common(p)

    p = sub.add_parser("vad", help="dump the voice-activity decision as CSV")
    p.add_argument("wav")
    _add_common(p)

    p = sub.add_parser("segment", help="dump delta-BIC change points as CSV")
    p.add_argument("wav")
    _add_common(p)

    p = sub.add_parser("select-gmm",
                       help="AIC/BIC curve over mixture component counts")
    p.add_argument("wav")
    p.add_argument("--m-lo", type=int, default=1)
    p.add_argument("--m-hi", type=int, default=8)
    _add_common(p)

    p = sub.add_parser("eval-der", help="diarization error rate of two RTTMs")
    p.add_argument("reference")
    p.add_argument("hypothesis")
    p.add_argument("--collar", type=float, default=0.25)
    _add_common(p)

    p = sub.add_parser("eval-wer", help="word error rate of two transcripts")
    p.add_argument("reference")
    p.add_argument("hypothesis")
    _add_common(p)

    p = sub.add_parser("synth", help="generate a synthetic multi-speaker WAV")
    p.add_argument("--speakers", type=int, default=2)
    p.add_argument("--turns", type=int, default=4)
    p.add_argument("--turn-seconds", type=float, default=4.7)
    p.add_argument("--sample-rate", type=int, default=16000)
    p.add_argument("--reference", metavar="PATH",
                   help="also write the ground-truth RTTM here")
    _add_common(p)

    return parser


def _load_cfg(args):
    cfg = load_config(args.config) if args.config else PipelineConfig().validate()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "auto_threshold", False):
        cfg.cluster_threshold = -1.0
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return cfg


def _out(args, default_name):
    if args.output:
        return Path(args.output)
    if args.dump_dir:
        return Path(args.dump_dir) / default_name
    return None


def _dump_dir(args):
    if args.dump_dir:
        d = Path(args.dump_dir)
        d.mkdir(parents=True, exist_ok=True)
        return d
    return None


def cmd_diarize(args, cfg):
    art = pipeline.PipelineArtifacts()
    result = pipeline.run_pipeline(args.wav, cfg, artifacts=art)
    text = pipeline.write_rttm(result)
    out = _out(args, f"{result.file_id}.rttm")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    dump = _dump_dir(args)
    if dump:
        hop_s = cfg.hop_ms / 1000.0
        with open(dump / "vad.csv", "w") as f:
            vad.vad_csv(art.energies, art.vad_decision, f)
        plots.save_vad_plot(art.energies, art.vad_decision, hop_s,
                            dump / "vad.png")
        with open(dump / "features.csv", "w") as f:
            features.features_csv(art.feature_matrix, f)
        plots.save_feature_heatmap(art.feature_matrix, dump / "features.png")
        if art.dendrogram is not None:
            with open(dump / "dendrogram.csv", "w") as f:
                clustering.dendrogram_csv(art.dendrogram, f)
            if art.dendrogram.merges:
                plots.save_dendrogram_plot(art.dendrogram, dump / "dendrogram.png")
        if result.turns:
            plots.save_timeline_plot(result, dump / "timeline.png")
    return 0


def _features_for(args, cfg, buffer, file_id):
    base = features.mfcc(buffer, cfg.frame_ms, cfg.hop_ms, cfg.n_fft or None,
                         cfg.n_filters, cfg.n_coeffs, source=file_id)
    if args.block == "base":
        return base
    if args.block == "delta":
        return features.delta(base, cfg.delta_width)
    if args.block == "delta2":
        return features.delta(features.delta(base, cfg.delta_width),
                              cfg.delta_width)
    return features.stack_deltas(base, cfg.delta_width)


def cmd_features(args, cfg):
    buffer = audio_io.load_wav(args.wav)
    feats = _features_for(args, cfg, buffer, pipeline._file_id(args.wav))
    out = _out(args, "features.csv")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as f:
            features.features_csv(feats, f)
    else:
        features.features_csv(feats, sys.stdout)
    dump = _dump_dir(args)
    if dump:
        plots.save_feature_heatmap(feats, dump / "features.png",
                                   title=f"{args.block} MFCC block")
    return 0


def cmd_vad(args, cfg):
    buffer = audio_io.load_wav(args.wav)
    sr = buffer.sample_rate_hz
    energies = audio_io.frame_rms(buffer, round(cfg.frame_ms * sr / 1000),
                                  round(cfg.hop_ms * sr / 1000))
    decision = vad.detect_speech(energies, cfg.vad_alpha, cfg.vad_percentile,
                                 cfg.vad_hangover_frames,
                                 cfg.vad_min_speech_frames)
    out = _out(args, "vad.csv")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as f:
            vad.vad_csv(energies, decision, f)
    else:
        vad.vad_csv(energies, decision, sys.stdout)
    dump = _dump_dir(args)
    if dump:
        plots.save_vad_plot(energies, decision, cfg.hop_ms / 1000.0,
                            dump / "vad.png")
    return 0


def cmd_segment(args, cfg):
    art = pipeline.PipelineArtifacts()
    pipeline.run_pipeline(args.wav, cfg, artifacts=art)
    bic_feats = art.feature_matrix.vectors[:, :cfg.bic_feature_dims]
    rows = ["boundary_frame,delta_bic"]
    for left, right in zip(art.segments, art.segments[1:]):
        if left.end_frame != right.start_frame:
            continue  # silence gap, not a committed split
        window = bic_feats[left.start_frame:right.end_frame]
        split = left.end_frame - left.start_frame
        d = bic_feats.shape[1]
        if d + 1 <= split <= window.shape[0] - (d + 1):
            value = segmentation.delta_bic(window, split, cfg.bic_lambda)
            rows.append(f"{left.end_frame},{value!r}")
    text = "\n".join(rows) + "\n"
    out = _out(args, "boundaries.csv")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_select_gmm(args, cfg):
    buffer = audio_io.load_wav(args.wav)
    sr = buffer.sample_rate_hz
    energies = audio_io.frame_rms(buffer, round(cfg.frame_ms * sr / 1000),
                                  round(cfg.hop_ms * sr / 1000))
    decision = vad.detect_speech(energies, cfg.vad_alpha, cfg.vad_percentile,
                                 cfg.vad_hangover_frames,
                                 cfg.vad_min_speech_frames)
    feats = features.mfcc(buffer, cfg.frame_ms, cfg.hop_ms, cfg.n_fft or None,
                          cfg.n_filters, cfg.n_coeffs)
    X = feats.vectors[decision.mask[: feats.n_frames]] \
        if decision.speech_regions else feats.vectors
    best_m, curve = gmm.select_n_components(X, args.m_lo, args.m_hi, "bic",
                                            seed=cfg.seed)
    rows = ["n_components,aic,bic"]
    rows += [f"{m},{a!r},{b!r}" for m, a, b in curve]
    text = "\n".join(rows) + "\n"
    out = _out(args, "selection.csv")
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    print(f"best n_components by BIC: {best_m}", file=sys.stderr)
    dump = _dump_dir(args)
    if dump:
        plots.save_selection_curve(curve, dump / "selection.png")
    return 0


def cmd_eval_der(args, cfg):
    ref = pipeline.parse_rttm(Path(args.reference).read_text())
    hyp = pipeline.parse_rttm(Path(args.hypothesis).read_text())
    result = metrics.der(pipeline.diarization_timeline(ref),
                         pipeline.diarization_timeline(hyp), args.collar)
    print(f"DER {result.rate:.4f} "
          f"missed {result.missed_s:.2f}s "
          f"false_alarm {result.false_alarm_s:.2f}s "
          f"confusion {result.confusion_s:.2f}s "
          f"scored_speech {result.scored_speech_s:.2f}s")
    return 0


def cmd_eval_wer(args, cfg):
    ref = metrics.tokenize(Path(args.reference).read_text())
    hyp = metrics.tokenize(Path(args.hypothesis).read_text())
    result = metrics.wer(ref, hyp)
    print(f"WER {result.rate:.4f} sub {result.substitutions} "
          f"ins {result.insertions} del {result.deletions}")
    return 0


def cmd_synth(args, cfg):
    fundamentals = [120.0 + 160.0 * i for i in range(args.speakers)]
    plan = [(i % args.speakers, args.turn_seconds) for i in range(args.turns)]
    buffer, timeline = synth.synth_fixture(fundamentals, plan,
                                           args.sample_rate, cfg.seed)
    out = _out(args, "synth.wav") or Path("synth.wav")
    out.parent.mkdir(parents=True, exist_ok=True)
    audio_io.write_wav(out, buffer)
    if args.reference:
        d = pipeline.Diarization(pipeline._file_id(str(out)),
                                 [(s, e - s, lab) for s, e, lab in timeline])
        Path(args.reference).write_text(pipeline.write_rttm(d))
    print(f"wrote {out} ({buffer.duration_seconds:.1f} s)", file=sys.stderr)
    return 0


COMMANDS = {
    "diarize": cmd_diarize,
    "features": cmd_features,
    "vad": cmd_vad,
    "segment": cmd_segment,
    "select-gmm": cmd_select_gmm,
    "eval-der": cmd_eval_der,
    "eval-wer": cmd_eval_wer,
    "synth": cmd_synth,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_cfg(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args, cfg)
    except (audio_io.WavError, FileNotFoundError) as exc:
        print(f"audio error: {exc}", file=sys.stderr)
        return EXIT_AUDIO
    except pipeline.PipelineError as exc:
        if isinstance(exc.__cause__, (audio_io.WavError, FileNotFoundError)):
            print(f"audio error: {exc}", file=sys.stderr)
            return EXIT_AUDIO
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except ValueError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
