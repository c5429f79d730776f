"""Command-line driver: vectorize a corpus, compute distance matrices,
train the binary map, and emit report files.

Every file an invocation produces is tracked; on any failure the partial
outputs are removed, a single diagnostic goes to stderr and the exit code is
nonzero.  All randomness derives from the --seed flag.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .hamming import (
    classical_hamming,
    exact_distance_matrix,
    sampled_distance_matrix,
)
from .sofm import (
    TrainConfig,
    converged,
    clusters_to_csv,
    evaluations_to_csv,
    initial_map,
    label_purity,
    labels_to_csv,
    traces_to_jsonl,
    train,
)
from .textvec import (
    DEFAULT_MAX_DF,
    DEFAULT_MIN_DF,
    DEFAULT_SIZE,
    DEFAULT_STOPLIST,
    build_vocabulary,
    load_corpus,
    load_vectors_csv,
    sample_corpus,
    vectorize,
    vectors_to_csv,
    vocabulary_to_json,
)

BACKEND_FLAGS = {
    "classical": "classical",
    "quantum-exact": "quantum_exact",
    "quantum-sampled": "quantum_sampled",
}

DEFAULT_SHOTS = 8192
_INIT_STREAM = 17


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsofm",
        description="Binary self-organizing map with a simulated quantum Hamming-distance kernel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_vec = sub.add_parser("vectorize", help="turn a corpus into bit vectors")
    p_vec.add_argument("--corpus", required=True, help="directory of .txt files, a .json corpus, or 'sample'")
    p_vec.add_argument("--n", type=int, default=DEFAULT_SIZE, help="vocabulary size / vector width")
    p_vec.add_argument("--min-df", type=int, default=DEFAULT_MIN_DF, help="minimum document frequency")
    p_vec.add_argument("--max-df", type=int, default=DEFAULT_MAX_DF, help="maximum document frequency")
    p_vec.add_argument(
        "--stopword",
        action="append",
        default=None,
        help=f"word to exclude; repeatable (default: {', '.join(DEFAULT_STOPLIST)})",
    )
    p_vec.add_argument("--out-dir", required=True)
    p_vec.set_defaults(func=cmd_vectorize)

    p_dist = sub.add_parser("distance", help="distance matrix between two vector sets")
    p_dist.add_argument("--vectors-a", required=True, help="row vectors (id,tag,vector CSV)")
    p_dist.add_argument("--vectors-b", required=True, help="column vectors (id,tag,vector CSV)")
    p_dist.add_argument("--backend", choices=sorted(BACKEND_FLAGS), default="quantum-exact")
    p_dist.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p_dist.add_argument("--seed", type=int, default=0)
    p_dist.add_argument("--workers", type=int, default=1)
    p_dist.add_argument(
        "--threshold-median",
        action="store_true",
        help="also write a 0/1 grid marking entries below the median distance",
    )
    p_dist.add_argument("--out-dir", required=True)
    p_dist.set_defaults(func=cmd_distance)

    p_train = sub.add_parser("train", help="train the binary map on a vector set")
    p_train.add_argument("--vectors", required=True, help="sample vectors (id,tag,vector CSV)")
    p_train.add_argument("--clusters", type=int, required=True, help="number of cluster vectors")
    p_train.add_argument("--backend", choices=sorted(BACKEND_FLAGS), default="quantum-exact")
    p_train.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--epochs", type=int, default=16)
    p_train.add_argument(
        "--init",
        choices=("spread", "uniform"),
        default="spread",
        help="initial clusters: farthest-first over the samples, or uniform random vectors",
    )
    p_train.add_argument("--workers", type=int, default=1)
    p_train.add_argument("--out-dir", required=True)
    p_train.set_defaults(func=cmd_train)

    p_rep = sub.add_parser("report", help="end-to-end run: vectorize, distances, training")
    p_rep.add_argument("--corpus", required=True, help="directory of .txt files, a .json corpus, or 'sample'")
    p_rep.add_argument("--n", type=int, default=DEFAULT_SIZE)
    p_rep.add_argument("--min-df", type=int, default=DEFAULT_MIN_DF)
    p_rep.add_argument("--max-df", type=int, default=DEFAULT_MAX_DF)
    p_rep.add_argument("--stopword", action="append", default=None)
    p_rep.add_argument("--clusters", type=int, default=3)
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--epochs", type=int, default=16)
    p_rep.add_argument("--init", choices=("spread", "uniform"), default="spread")
    p_rep.add_argument("--threshold-median", action="store_true")
    p_rep.add_argument("--out-dir", required=True)
    p_rep.set_defaults(func=cmd_report)

    return parser


def _emit(path: Path, text: str, written: list[Path]) -> None:
    path.write_text(text)
    written.append(path)
    print(f"wrote {path}")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus_arg(spec: str):
    return sample_corpus() if spec == "sample" else load_corpus(spec)


def _fmt12(value: float) -> str:
    return format(value, ".12g")


def _grid_csv(rows: int, cols: int, cell) -> str:
    lines = ["input," + ",".join(str(j) for j in range(cols))]
    for i in range(rows):
        lines.append(f"{i}," + ",".join(cell(i, j) for j in range(cols)))
    return "\n".join(lines) + "\n"


def _median_threshold_csv(values: np.ndarray) -> str:
    present = values[np.isfinite(values)]
    if present.size == 0:
        raise ValueError("no distance values available for the median threshold")
    median = float(np.median(present))

    def cell(i: int, j: int) -> str:
        if not np.isfinite(values[i, j]):
            return ""
        return "1" if values[i, j] < median else "0"

    return _grid_csv(values.shape[0], values.shape[1], cell)


def _vectorize_corpus(args):
    stoplist = tuple(args.stopword) if args.stopword else DEFAULT_STOPLIST
    corpus = _load_corpus_arg(args.corpus)
    vocabulary = build_vocabulary(
        corpus, size=args.n, min_df=args.min_df, max_df=args.max_df, stoplist=stoplist
    )
    return corpus, vocabulary, vectorize(corpus, vocabulary)


def cmd_vectorize(args, written: list[Path]) -> None:
    out = _out_dir(args)
    corpus, vocabulary, vectors = _vectorize_corpus(args)
    _emit(out / "vocabulary.json", vocabulary_to_json(vocabulary), written)
    _emit(out / "vectors.csv", vectors_to_csv(corpus, vectors), written)


def _distance_outputs(vectors_a, vectors_b, backend: str, args, out: Path, written: list[Path], prefix: str = "") -> None:
    if backend == "classical":
        ints = [[classical_hamming(a, b) for b in vectors_b] for a in vectors_a]
        _emit(
            out / f"{prefix}distance_integers.csv",
            _grid_csv(len(vectors_a), len(vectors_b), lambda i, j: str(ints[i][j])),
            written,
        )
        if getattr(args, "threshold_median", False):
            grid = np.asarray(ints, dtype=float)
            _emit(out / f"{prefix}distance_thresholded.csv", _median_threshold_csv(grid), written)
        return
    if backend == "quantum_exact":
        matrix = exact_distance_matrix(vectors_a, vectors_b)
    else:
        matrix = sampled_distance_matrix(
            vectors_a, vectors_b, shots=args.shots, seed=args.seed, workers=args.workers
        )
        if matrix.missing():
            print(
                f"note: {len(matrix.missing())} entr(y/ies) received no readouts at "
                f"{args.shots} shots and are reported as missing"
            )
    _emit(out / f"{prefix}distance.csv", matrix.to_csv(), written)
    _emit(out / f"{prefix}distance.json", matrix.to_json(), written)
    _emit(out / f"{prefix}distance_integers.csv", matrix.to_integer_csv(), written)
    if getattr(args, "threshold_median", False):
        _emit(
            out / f"{prefix}distance_thresholded.csv",
            _median_threshold_csv(matrix.normalized_values()),
            written,
        )


def cmd_distance(args, written: list[Path]) -> None:
    out = _out_dir(args)
    _, _, vectors_a = load_vectors_csv(args.vectors_a)
    _, _, vectors_b = load_vectors_csv(args.vectors_b)
    _distance_outputs(vectors_a, vectors_b, BACKEND_FLAGS[args.backend], args, out, written)


def _train_outputs(vectors, tags, args, backend: str, out: Path, written: list[Path], prefix: str = "") -> dict:
    if args.clusters < 1:
        raise ValueError("--clusters must be >= 1")
    init_rng = np.random.default_rng(np.random.SeedSequence([args.seed, _INIT_STREAM]))
    initial = initial_map(vectors, args.clusters, init_rng, strategy=getattr(args, "init", "spread"))
    config = TrainConfig(
        epochs=args.epochs,
        backend=backend,
        shots=getattr(args, "shots", DEFAULT_SHOTS),
        rng_seed=args.seed,
        workers=getattr(args, "workers", 1),
    )
    traces = train(initial, vectors, config)
    _emit(out / f"{prefix}trace.jsonl", traces_to_jsonl(traces), written)
    _emit(out / f"{prefix}labels.csv", labels_to_csv(traces), written)
    _emit(out / f"{prefix}evaluations.csv", evaluations_to_csv(traces), written)
    _emit(out / f"{prefix}clusters_final.csv", clusters_to_csv(traces[-1].clusters), written)
    summary = {
        "backend": backend,
        "seed": args.seed,
        "epochs_run": len(traces),
        "converged": converged(traces),
        "total_distance_evaluations": sum(t.distance_evaluations for t in traces),
    }
    if all(tag is not None for tag in tags):
        summary["label_purity"] = label_purity(traces[-1].labels, tags)
    return summary


def cmd_train(args, written: list[Path]) -> None:
    out = _out_dir(args)
    _, tags, vectors = load_vectors_csv(args.vectors)
    summary = _train_outputs(vectors, tags, args, BACKEND_FLAGS[args.backend], out, written)
    _emit(out / "summary.json", json.dumps(summary, indent=2) + "\n", written)


def cmd_report(args, written: list[Path]) -> None:
    """Full pipeline on one corpus, comparing backends on the same seed."""
    out = _out_dir(args)
    corpus, vocabulary, vectors = _vectorize_corpus(args)
    _emit(out / "vocabulary.json", vocabulary_to_json(vocabulary), written)
    _emit(out / "vectors.csv", vectors_to_csv(corpus, vectors), written)

    _distance_outputs(vectors, vectors, "classical", args, out, written, prefix="classical_")
    _distance_outputs(vectors, vectors, "quantum_exact", args, out, written, prefix="quantum_")

    tags = list(corpus.tags())
    summaries = {}
    for flag, backend in (("classical", "classical"), ("quantum-exact", "quantum_exact")):
        prefix = backend + "_"
        summaries[backend] = _train_outputs(vectors, tags, args, backend, out, written, prefix=prefix)
    traces_equal = (out / "classical_trace.jsonl").read_bytes() == (
        out / "quantum_exact_trace.jsonl"
    ).read_bytes()
    report = {
        "documents": len(corpus),
        "vocabulary": list(vocabulary.words),
        "training": summaries,
        "backend_traces_identical": traces_equal,
    }
    _emit(out / "summary.json", json.dumps(report, indent=2) + "\n", written)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    written: list[Path] = []
    try:
        args.func(args, written)
    except (ValueError, OSError, RuntimeError) as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
