"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Results go to stdout or to the files named by flags; diagnostics go to
stderr.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext
from dataclasses import replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .annotation import DEFAULT_MASK_WIDTH_HZ, annotation_matrix, harmonic_mask
from .dictionary import NnscConfig, concat_dictionaries, split_activation, train_dictionary
from .dsp import DEFAULT_WINDOW_LEN, Spectrogram, istft, reconstruct_sources, resample_half, stft
from .errors import DataFormatError, NumericalError
from .fileio import load_dict, load_wav, parse_pitch, save_dict, save_wav, write_pitch
from .metrics import evaluate_separation
from .solvers import (
    DICTIONARY_METHODS,
    INFORMED_METHODS,
    METHODS,
    ProblemSpec,
    default_config,
    solve,
)
from .synth import gen_audio_fixture, run_scaling

PIPELINE_RATE_HZ = 22050.0


class UsageError(Exception):
    """Bad flag combination; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _log(msg):
    print(msg, file=sys.stderr)


def _add_solver_flags(parser):
    group = parser.add_argument_group("solver")
    group.add_argument("--tol", type=float, default=1e-5, help="convergence tolerance on the relative constraint residual")
    group.add_argument("--mu0", type=float, default=1e-3, help="initial penalty parameter")
    group.add_argument("--rho", type=float, default=1.2, help="penalty growth factor (1 = plain ADMM)")
    group.add_argument("--lambda", dest="lam", default="auto", help="sparsity weight, or 'auto' for 1/sqrt(max(m,n))")
    group.add_argument("--gamma", default="auto", help="annotation weight, or 'auto' for 2/sqrt(max(m,n)) on informed methods")
    group.add_argument("--max-iters", type=int, default=1000, help="iteration cap")


def _add_threads_flag(parser):
    parser.add_argument("--threads", type=int, default=None, help="cap BLAS/FFT worker threads")


def _threads_context(args):
    threads = getattr(args, "threads", None)
    if threads is None:
        return nullcontext()
    if threads < 1:
        raise UsageError("--threads must be at least 1")
    return threadpool_limits(limits=threads)


def _load_clip_for_pipeline(path):
    """Load a WAV and bring it to the 22050 Hz pipeline rate (2:1 only)."""
    clip = load_wav(path)
    if clip.sample_rate_hz == PIPELINE_RATE_HZ:
        return clip
    if clip.sample_rate_hz == 2 * PIPELINE_RATE_HZ:
        return resample_half(clip)
    raise DataFormatError(
        f"{path}: sample rate {clip.sample_rate_hz} Hz unsupported; expected "
        f"{PIPELINE_RATE_HZ:.0f} or {2 * PIPELINE_RATE_HZ:.0f}"
    )


def _config_from_args(m, n, method, args):
    config = default_config(m, n, method)
    try:
        lam = config.lam if args.lam == "auto" else float(args.lam)
        gamma = config.gamma if args.gamma == "auto" else float(args.gamma)
    except ValueError:
        raise UsageError("--lambda and --gamma take a number or 'auto'") from None
    if args.gamma != "auto" and method not in INFORMED_METHODS and gamma != 0.0:
        raise UsageError(f"--gamma must be 0 (or 'auto') for uninformed method {method!r}")
    try:
        return replace(
            config, lam=lam, gamma=gamma, mu0=args.mu0, rho=args.rho,
            tol=args.tol, max_iters=args.max_iters,
        )
    except ValueError as exc:  # out-of-range solver flags are usage errors
        raise UsageError(str(exc)) from None


def cmd_train_dict(args):
    wav_paths = sorted(Path(args.frames_from).glob("*.wav"))
    if not wav_paths:
        raise DataFormatError(f"no .wav files found in {args.frames_from}")
    with _threads_context(args):
        mags = []
        for path in wav_paths:
            clip = _load_clip_for_pipeline(path)
            mags.append(stft(clip).magnitude)
        frames = np.hstack(mags)
        rng = np.random.default_rng(args.seed)
        if frames.shape[1] > args.max_frames:
            keep = np.sort(rng.choice(frames.shape[1], size=args.max_frames, replace=False))
            frames = frames[:, keep]
        config = NnscConfig(
            num_atoms=args.atoms,
            lambda_dict=args.lambda_dict,
            max_epochs=args.epochs,
            code_iters=args.code_iters,
            seed=args.seed,
        )
        _log(
            f"training {args.atoms} atoms on {frames.shape[1]} frames "
            f"from {len(wav_paths)} file(s)"
        )
        trained = train_dictionary(
            frames, config, sample_rate_hz=PIPELINE_RATE_HZ, fft_size=DEFAULT_WINDOW_LEN
        )
    save_dict(args.out, trained)
    _log(f"wrote {args.out}")
    return 0


def cmd_merge_dicts(args):
    merged = concat_dictionaries([load_dict(p) for p in args.dicts])
    save_dict(args.out, merged)
    _log(f"wrote {args.out} (k={merged.num_atoms}, groups={merged.groups})")
    return 0


def _synth_component(mag, spec):
    return istft(
        Spectrogram(
            magnitude=np.maximum(mag, 0.0),
            phase=spec.phase,
            window_len=spec.window_len,
            hop=spec.hop,
            fft_size=spec.fft_size,
            sample_rate_hz=spec.sample_rate_hz,
            num_samples=spec.num_samples,
        )
    )


def cmd_separate(args):
    method = args.method
    if method in INFORMED_METHODS and args.pitch is None:
        raise UsageError(f"--pitch is required for informed method {method!r}")
    if method in DICTIONARY_METHODS and args.dict is None:
        raise UsageError(f"--dict is required for dictionary method {method!r}")
    if method not in DICTIONARY_METHODS and args.dict is not None:
        _log(f"warning: {method!r} uses the identity dictionary; ignoring --dict")

    clip = _load_clip_for_pipeline(args.mix)
    with _threads_context(args):
        spec = stft(clip)
        magnitude = spec.magnitude
        m, n = magnitude.shape

        dictionary = None
        if method in DICTIONARY_METHODS:
            dictionary = load_dict(args.dict)
            if dictionary.fft_size != spec.fft_size or dictionary.num_bins != m:
                raise DataFormatError(
                    f"{args.dict}: dictionary framing (fft={dictionary.fft_size}, "
                    f"bins={dictionary.num_bins}) does not match the analysis "
                    f"(fft={spec.fft_size}, bins={m})"
                )

        E0 = None
        if method in INFORMED_METHODS:
            contour = parse_pitch(args.pitch, frame_period=args.frame_period)
            mask = harmonic_mask(contour, spec, w_hz=args.mask_width_hz)
            E0 = annotation_matrix(magnitude, mask)

        config = _config_from_args(m, n, method, args)
        problem = ProblemSpec(
            X=magnitude,
            method=method,
            D=dictionary.atoms if dictionary is not None else None,
            E0=E0,
            groups=dictionary.groups if dictionary is not None else None,
        )
        solution = solve(problem, config)
        if not solution.converged:
            _log(
                f"warning: stopped after {solution.iters} iterations with "
                f"residual {solution.residual_history[-1]:.3e} (tol {config.tol:.1e})"
            )
        else:
            _log(f"converged in {solution.iters} iterations ({solution.wall_time:.2f} s)")

        sources = reconstruct_sources(solution, spec)
        save_wav(args.out_voice, sources.voice)
        save_wav(args.out_music, sources.music)
        _log(f"wrote {args.out_voice} and {args.out_music}")

        if args.out_component_prefix:
            if problem.groups and len(problem.groups) > 1:
                blocks = split_activation(solution.Z, problem.groups)
                offsets = np.cumsum((0,) + problem.groups)
                for i, block in enumerate(blocks):
                    sub_atoms = dictionary.atoms[:, offsets[i]:offsets[i + 1]]
                    component = _synth_component(sub_atoms @ block, spec)
                    out = f"{args.out_component_prefix}_{i + 1}.wav"
                    save_wav(out, component)
                    _log(f"wrote {out}")
            else:
                _log(
                    "warning: --out-component-prefix needs a dictionary with "
                    "more than one group; no stems written"
                )
    return 0


def _evaluate_one(estimate_path, reference_path, mixture_path, other_paths):
    estimate = load_wav(estimate_path)
    reference = load_wav(reference_path)
    mixture = load_wav(mixture_path)
    others = [load_wav(p) for p in other_paths]
    return evaluate_separation(estimate, reference, mixture, others)


def _metric_row(label, report):
    return (
        f"{label}\t{report.sdr_db:.6f}\t{report.sir_db:.6f}"
        f"\t{report.sar_db:.6f}\t{report.nsdr_db:.6f}"
    )


def cmd_evaluate(args):
    print("estimate\tSDR\tSIR\tSAR\tNSDR")
    with _threads_context(args):
        if args.batch:
            reports = []
            for lineno, line in enumerate(Path(args.batch).read_text().splitlines(), 1):
                if not line.strip():
                    continue
                fields = line.rstrip("\n").split("\t")
                if len(fields) not in (3, 4):
                    raise DataFormatError(
                        f"{args.batch}:{lineno}: expected estimate/reference/"
                        f"mixture[/others] columns, got {len(fields)}"
                    )
                others = [p for p in fields[3].split(",") if p] if len(fields) == 4 else []
                report = _evaluate_one(fields[0], fields[1], fields[2], others)
                reports.append(report)
                print(_metric_row(fields[0], report))
            if not reports:
                raise DataFormatError(f"{args.batch}: no evaluation rows")
            means = [
                float(np.mean([getattr(r, f) for r in reports]))
                for f in ("sdr_db", "sir_db", "sar_db", "nsdr_db")
            ]
            print("G\t" + "\t".join(f"{v:.6f}" for v in means))
        else:
            if not (args.estimate and args.reference and args.mixture):
                raise UsageError("--estimate, --reference and --mixture are required (or use --batch)")
            report = _evaluate_one(args.estimate, args.reference, args.mixture, args.others or [])
            print(_metric_row(args.estimate, report))
    return 0


def cmd_bench_scaling(args):
    try:
        n_values = [int(v) for v in args.n.split(",") if v]
    except ValueError:
        raise UsageError(f"--n must be a comma-separated integer list, got {args.n!r}") from None
    if not n_values:
        raise UsageError("--n must name at least one frame count")
    rows = run_scaling(args.method, args.m, args.k, n_values, seed=args.seed, iters=args.iters)
    print("n\tmethod\tseconds_per_iter\ttotal_seconds\titers")
    for row in rows:
        print(
            f"{row.n}\t{row.method}\t{row.seconds_per_iter:.6f}"
            f"\t{row.total_seconds:.6f}\t{row.iters}"
        )
    return 0


def cmd_synth_fixture(args):
    fixture = gen_audio_fixture(args.duration, args.seed)
    out_dir = Path(args.out_dir)
    music_dir = out_dir / "music"
    music_dir.mkdir(parents=True, exist_ok=True)
    save_wav(out_dir / "mixture.wav", fixture.mixture)
    save_wav(out_dir / "voice.wav", fixture.voice)
    save_wav(music_dir / "music.wav", fixture.music)
    write_pitch(out_dir / "pitch.csv", fixture.contour)
    _log(f"wrote fixture ({args.duration:.1f} s, seed {args.seed}) under {out_dir}")
    return 0


def build_parser():
    parser = _Parser(prog="gsrsep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("train-dict", parents=[], help="train an instrumental dictionary from WAV files")
    p.add_argument("--frames-from", required=True, metavar="DIR", help="directory of training WAV files")
    p.add_argument("--atoms", type=int, default=100, help="dictionary size")
    p.add_argument("--epochs", type=int, default=30, help="training epochs")
    p.add_argument("--seed", type=int, default=0, help="deterministic initialization seed")
    p.add_argument("--out", required=True, help="output dictionary path (.gsd)")
    p.add_argument("--lambda-dict", type=float, default=None, help="coding sparsity weight (default 1/sqrt(m))")
    p.add_argument("--max-frames", type=int, default=2000, help="subsample to at most this many training frames")
    p.add_argument("--code-iters", type=int, default=100, help="coordinate-descent sweeps per coding pass")
    _add_threads_flag(p)
    p.set_defaults(func=cmd_train_dict)

    p = sub.add_parser("merge-dicts", help="concatenate dictionaries into one grouped dictionary")
    p.add_argument("dicts", nargs="+", help="dictionary files to merge, in order")
    p.add_argument("--out", required=True, help="output dictionary path")
    p.set_defaults(func=cmd_merge_dicts)

    p = sub.add_parser("separate", help="separate a mixture into voice and accompaniment")
    p.add_argument("--mix", required=True, help="input mixture WAV")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--dict", help="dictionary file (required for lrr/lrri/gsr/gsri)")
    p.add_argument("--pitch", help="pitch contour file (required for rpcai/lrri/gsri)")
    p.add_argument("--frame-period", type=float, default=None, help="treat the pitch file as headerless single-column with this period (s)")
    p.add_argument("--mask-width-hz", type=float, default=DEFAULT_MASK_WIDTH_HZ, help="harmonic mask width")
    p.add_argument("--out-voice", required=True, help="output voice WAV")
    p.add_argument("--out-music", required=True, help="output accompaniment WAV")
    p.add_argument("--out-component-prefix", default=None, help="also write per-group stems PREFIX_i.wav when the dictionary has groups")
    _add_solver_flags(p)
    _add_threads_flag(p)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("evaluate", help="report SDR/SIR/SAR/NSDR for separated sources")
    p.add_argument("--estimate", help="estimated source WAV")
    p.add_argument("--reference", help="true source WAV")
    p.add_argument("--mixture", help="original mixture WAV")
    p.add_argument("--others", nargs="*", default=[], help="the remaining true sources")
    p.add_argument("--batch", help="TSV of estimate/reference/mixture[/comma-separated others] rows; prints G-prefixed means")
    _add_threads_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="timing harnesses")
    bench_sub = p.add_subparsers(dest="bench_command", required=True, metavar="what")
    ps = bench_sub.add_parser("scaling", help="per-iteration cost across frame counts")
    ps.add_argument("--method", default="gsr", choices=METHODS)
    ps.add_argument("--m", type=int, default=706, help="spectrogram bins")
    ps.add_argument("--k", type=int, default=100, help="dictionary atoms")
    ps.add_argument("--n", default="500,1000,2000", help="comma-separated frame counts")
    ps.add_argument("--seed", type=int, default=7)
    ps.add_argument("--iters", type=int, default=50, help="fixed iteration count per run")
    ps.set_defaults(func=cmd_bench_scaling)

    p = sub.add_parser("synth", help="synthetic data generators")
    synth_sub = p.add_subparsers(dest="synth_command", required=True, metavar="what")
    pf = synth_sub.add_parser("fixture", help="write a mixture/voice/music/pitch test scene")
    pf.add_argument("--duration", type=float, default=10.0, help="seconds of audio")
    pf.add_argument("--seed", type=int, default=7)
    pf.add_argument("--out-dir", required=True, help="output directory")
    pf.set_defaults(func=cmd_synth_fixture)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed; includes --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gsrsep: usage error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, FloatingPointError) as exc:
        print(f"gsrsep: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"gsrsep: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
