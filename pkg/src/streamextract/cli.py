"""Command-line entry point for the extraction pipeline.

Subcommands cover the whole batch flow: synth -> stats -> embed ->
recognize -> featurize/train -> predict, plus nn queries and the eval
experiments. Defaults live in an optional JSON config file and every
value can be overridden by a flag; all randomness flows from one seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import KERNEL_IMPL
from .classify import ForestConfig, TrainedExtractor, oversample_balance, train_classifier
from .corpus import CorpusStats, compute_corpus_stats, read_documents
from .embedding import EmbeddingConfig, VectorStore, nearest_neighbors, train_embeddings
from .evaluation import (TrialConfig, drift_experiment, k_sweep, run_trials,
                         runtime_benchmark, trials_to_rows, write_results_csv)
from .pipeline import (build_store, featurize_candidates, normalized_sequences)
from .recognize import (RecognizerSpec, build_gazetteer_recognizer,
                        build_pattern_recognizer, load_gazetteer_file,
                        load_pattern_config, merge_candidates, read_candidates,
                        recognize_spans, write_candidates)
from .synth import SynthSpec, generate_corpus

DEFAULTS = {
    "d": 200, "r": 0.01, "u": 2, "v": 2, "theta": 0.01,
    "k": 20, "n_trees": 10, "seed": 0,
    "train_fraction": 0.3, "n_trials": 10,
}


def _load_config(path: str | None) -> dict:
    cfg = dict(DEFAULTS)
    if path:
        with open(path, encoding="utf-8") as f:
            cfg.update(json.load(f))
    return cfg


def _val(args, cfg, name):
    flag = getattr(args, name, None)
    return flag if flag is not None else cfg[name]


def _embedding_config(args, cfg) -> EmbeddingConfig:
    return EmbeddingConfig(d=int(_val(args, cfg, "d")), r=float(_val(args, cfg, "r")),
                           u=int(_val(args, cfg, "u")), v=int(_val(args, cfg, "v")),
                           master_seed=int(_val(args, cfg, "seed")))


def cmd_synth(args, cfg):
    spec = SynthSpec(n_docs=args.docs, attributes=tuple(args.attributes.split(",")),
                     doc_len=args.doc_len, shared_pool=args.shared_pool,
                     pos_pool=args.pos_pool, neg_pool=args.neg_pool,
                     noise_rate=args.noise, obfuscation_rate=args.obfuscation,
                     seed=int(_val(args, cfg, "seed")))
    corpus = generate_corpus(spec)
    paths = corpus.write(args.out)
    print(f"synth: {len(corpus.documents)} docs, {corpus.token_count} tokens, "
          f"{len(corpus.gold)} gold annotations -> {args.out}")
    for name, p in sorted(paths.items()):
        print(f"  {name}: {p}")
    return 0


def cmd_stats(args, cfg):
    stats = compute_corpus_stats(read_documents(args.corpus),
                                 theta=float(_val(args, cfg, "theta"))).freeze()
    stats.save(args.out)
    print(f"stats: {stats.doc_count} docs, {len(stats.doc_freq)} unique units "
          f"(theta={stats.theta}) -> {args.out}")
    return 0


def cmd_embed(args, cfg):
    stats = CorpusStats.load(args.stats)
    ecfg = _embedding_config(args, cfg)
    store = None
    if args.append:
        store = VectorStore.load(args.append)
        if store.frozen:
            print("error: cannot append to a frozen store", file=sys.stderr)
            return 1
        store.stats = stats
    store = build_store(read_documents(args.corpus), stats, ecfg, store=store,
                        freeze=not args.no_freeze)
    store.save(args.out)
    print(f"embed[{KERNEL_IMPL}]: {len(store)} units, d={ecfg.d} "
          f"({'frozen' if store.frozen else 'open'}) -> {args.out}")
    return 0


def cmd_nn(args, cfg):
    store = VectorStore.load(args.store)
    k = int(_val(args, cfg, "k")) if args.k is None else args.k
    for unit, score in nearest_neighbors(store, args.unit, k):
        print(f"{unit}\t{score:.6f}")
    return 0


def _build_recognizers(args):
    recognizers = []
    for item in args.gazetteer or []:
        attribute, _, path = item.partition("=")
        entries = load_gazetteer_file(path)
        spec = RecognizerSpec(name=f"gazetteer-{attribute}", attribute=attribute,
                              kind="gazetteer", source=path)
        recognizers.append(build_gazetteer_recognizer(spec, entries))
    for path in args.patterns or []:
        pcfg = load_pattern_config(path)
        spec = RecognizerSpec(name=f"pattern-{pcfg['attribute']}",
                              attribute=pcfg["attribute"], kind="pattern", source=path)
        recognizers.append(build_pattern_recognizer(spec, pcfg["patterns"]))
    return recognizers


def cmd_recognize(args, cfg):
    from .corpus import tokenize
    recognizers = _build_recognizers(args)
    if not recognizers:
        print("error: no recognizers given (use --gazetteer/--patterns)", file=sys.stderr)
        return 1
    all_candidates = []
    for doc in read_documents(args.corpus):
        seq = tokenize(doc)
        all_candidates.extend(
            merge_candidates([recognize_spans(r, seq) for r in recognizers]))
    write_candidates(args.out, all_candidates)
    print(f"recognize: {len(all_candidates)} candidates -> {args.out}")
    return 0


def _load_dataset(args, cfg, labeled_only):
    stats = CorpusStats.load(args.stats)
    store = VectorStore.load(args.store)
    seqs = normalized_sequences(read_documents(args.corpus), stats)
    candidates = read_candidates(args.candidates)
    if args.attribute:
        candidates = [c for c in candidates if c.attribute == args.attribute]
    ds = featurize_candidates(candidates, seqs, store, u=store.cfg.u, v=store.cfg.v,
                              labeled_only=labeled_only)
    return ds, store


def cmd_featurize(args, cfg):
    ds, _ = _load_dataset(args, cfg, labeled_only=False)
    with open(args.out, "w", encoding="utf-8") as f:
        for ann, row, label in zip(ds.annotations, ds.X, ds.y):
            vals = "\t".join(repr(x) for x in row.tolist())
            f.write(f"{ann.doc_id}\t{ann.attribute}\t{ann.i}\t{ann.j}\t"
                    f"{ann.label}\t{vals}\n")
    print(f"featurize: {len(ds)} vectors of dim {ds.X.shape[1]} -> {args.out}")
    return 0


def cmd_train(args, cfg):
    ds, store = _load_dataset(args, cfg, labeled_only=True)
    seed = int(_val(args, cfg, "seed"))
    ds = oversample_balance(ds, seed=seed)
    fcfg = ForestConfig(n_trees=int(_val(args, cfg, "n_trees")), seed=seed)
    model = train_classifier(ds, fcfg, k=int(_val(args, cfg, "k")),
                             attribute=args.attribute or "",
                             u=store.cfg.u, v=store.cfg.v)
    model.save(args.out)
    print(f"train: forest of {fcfg.n_trees} trees on {len(ds)} balanced rows, "
          f"{len(model.selected)} selected features -> {args.out}")
    return 0


def cmd_predict(args, cfg):
    from dataclasses import replace

    from .classify import predict
    model = TrainedExtractor.load(args.model)
    if not args.attribute:
        args.attribute = model.attribute or None
    ds, _ = _load_dataset(args, cfg, labeled_only=False)
    labeled, scores = [], []
    for ann, row in zip(ds.annotations, ds.X):
        label, score = predict(model, row)
        labeled.append(replace(ann, label=label))
        scores.append(round(score, 6))
    write_candidates(args.out, labeled, scores=scores)
    n_pos = sum(1 for a in labeled if a.label == "correct")
    print(f"predict: {len(labeled)} candidates, {n_pos} labeled correct -> {args.out}")
    return 0


def cmd_eval(args, cfg):
    seed = int(_val(args, cfg, "seed"))
    tcfg = TrialConfig(train_fraction=float(_val(args, cfg, "train_fraction")),
                       n_trials=int(_val(args, cfg, "n_trials")), base_seed=seed)
    fcfg = ForestConfig(n_trees=int(_val(args, cfg, "n_trees")), seed=seed)
    k = int(_val(args, cfg, "k"))
    ecfg = _embedding_config(args, cfg)
    rows = []

    if args.experiment == "benchmark":
        sizes = [int(s) for s in args.sizes.split(",")]
        report = runtime_benchmark(sizes, ecfg, seed=seed, repeats=args.repeats)
        for r in report["rows"]:
            print(f"{r['tokens']} tokens: {r['seconds']:.3f} s")
        if "fit" in report:
            fit = report["fit"]
            print(f"linear fit: {fit['slope']:.3e} s/token, R^2={fit['r_squared']:.4f}")
        if args.emit_plot_data:
            with open(args.emit_plot_data, "w", encoding="utf-8") as f:
                for r in report["rows"]:
                    f.write(f"{r['tokens']}\t{r['seconds']:.6f}\n")
        return 0

    candidates = read_candidates(args.candidates)
    attributes = sorted({c.attribute for c in candidates if c.label != "unlabeled"})

    if args.experiment == "trials":
        stats = CorpusStats.load(args.stats)
        store = VectorStore.load(args.store)
        seqs = normalized_sequences(read_documents(args.corpus[0]), stats)
        for attribute in attributes:
            ds = featurize_candidates([c for c in candidates if c.attribute == attribute],
                                      seqs, store, u=store.cfg.u, v=store.cfg.v,
                                      labeled_only=True)
            res = run_trials(ds, tcfg, fcfg, k=k)
            print(f"{attribute}: P={res.mean_precision:.4f} R={res.mean_recall:.4f} "
                  f"F1={res.mean_f1:.4f} over {tcfg.n_trials} trials")
            rows.extend(trials_to_rows("trials", res, attribute=attribute, k=k))
    elif args.experiment == "ksweep":
        stats = CorpusStats.load(args.stats)
        store = VectorStore.load(args.store)
        seqs = normalized_sequences(read_documents(args.corpus[0]), stats)
        k_values = [int(x) for x in args.k_values.split(",")]
        for attribute in attributes:
            ds = featurize_candidates([c for c in candidates if c.attribute == attribute],
                                      seqs, store, u=store.cfg.u, v=store.cfg.v,
                                      labeled_only=True)
            for row in k_sweep(ds, k_values, tcfg, fcfg):
                print(f"{attribute} k={row['k']}: F1={row['f1']:.4f}")
                rows.extend(trials_to_rows("ksweep", row["result"],
                                           attribute=attribute, k=row["k"]))
    elif args.experiment == "drift":
        corpora = [list(read_documents(p)) for p in args.corpus]
        theta = float(_val(args, cfg, "theta"))
        for attribute in attributes:
            sub = [c for c in candidates if c.attribute == attribute]
            for row in drift_experiment(corpora, sub, theta, ecfg, tcfg, fcfg, k=k):
                print(f"{attribute} {row['corpus']} ({row['n_docs']} docs): "
                      f"F1={row['f1']:.4f}")
                rows.extend(trials_to_rows("drift", row["result"],
                                           corpus=row["corpus"], attribute=attribute, k=k))
    if args.out:
        write_results_csv(args.out, rows)
        print(f"results -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamextract",
        description="Feature-agnostic information extraction on streaming text")
    parser.add_argument("--config", help="JSON config file with default parameters")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_embedding(p):
        p.add_argument("--d", type=int, help="embedding dimension")
        p.add_argument("--r", type=float, help="context-vector sparsity ratio")
        p.add_argument("--u", type=int, help="window size before")
        p.add_argument("--v", type=int, help="window size after")
        p.add_argument("--seed", type=int, help="master random seed")

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--docs", type=int, default=100)
    p.add_argument("--doc-len", type=int, default=40)
    p.add_argument("--attributes", default="city,name")
    p.add_argument("--pos-pool", type=int, default=12)
    p.add_argument("--neg-pool", type=int, default=12)
    p.add_argument("--shared-pool", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--obfuscation", type=float, default=0.05)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="compute and freeze corpus statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--theta", type=float)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("embed", help="train or extend a vector store")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--append", help="existing unfrozen store to extend")
    p.add_argument("--no-freeze", action="store_true")
    common_embedding(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("nn", help="nearest-neighbor query against a store")
    p.add_argument("--store", required=True)
    p.add_argument("--unit", required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_nn)

    p = sub.add_parser("recognize", help="emit candidate annotations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gazetteer", action="append",
                   help="attribute=path, repeatable")
    p.add_argument("--patterns", action="append", help="pattern config JSON, repeatable")
    p.set_defaults(func=cmd_recognize)

    def common_dataset(p):
        p.add_argument("--corpus", required=True)
        p.add_argument("--stats", required=True)
        p.add_argument("--store", required=True)
        p.add_argument("--candidates", required=True)
        p.add_argument("--attribute")

    p = sub.add_parser("featurize", help="write contextual feature vectors")
    common_dataset(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train a contextual classifier")
    common_dataset(p)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--n-trees", dest="n_trees", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label candidates with a trained model")
    common_dataset(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="run evaluation experiments")
    p.add_argument("experiment", choices=["trials", "drift", "ksweep", "benchmark"])
    p.add_argument("--corpus", action="append",
                   help="corpus JSONL; repeat for drift's nested corpora")
    p.add_argument("--stats")
    p.add_argument("--store")
    p.add_argument("--candidates")
    p.add_argument("--out", help="results CSV path")
    p.add_argument("--k", type=int)
    p.add_argument("--k-values", default="5,10,20,50,100,200")
    p.add_argument("--n-trees", dest="n_trees", type=int)
    p.add_argument("--n-trials", dest="n_trials", type=int)
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.add_argument("--sizes", default="500000,1000000,2000000,4000000")
    p.add_argument("--repeats", type=int, default=1,
                   help="benchmark timing repeats (minimum is reported)")
    p.add_argument("--emit-plot-data", help="write (tokens, seconds) series to a file")
    p.add_argument("--theta", type=float)
    common_embedding(p)
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _load_config(args.config)
    try:
        return args.func(args, cfg)
    except (FileNotFoundError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
