"""Command-line interface.

Subcommands cover the full pipeline: dataset construction (toy, closure,
marginals, cpd, prune-cpd, negatives), training (train), inference
(query), evaluation (eval), DAG extraction (asymmetrize), and rendering
(plot).  Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import cpd as cpdio
from . import dag, datasets, metrics, plotting
from .errors import BoxlatError, DataFormatError, TrainingDiverged
from .measures import ProductMeasure
from .model import Model
from .queries import conditional_query
from .training import InitSpec, TrainConfig, TrainExample, fit


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")


def _build_parser():
    p = _Parser(prog="boxlat", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="fit a model from TSV targets")
    t.add_argument("--out", required=True, help="model file to write")
    t.add_argument("--config", help="JSON file of hyperparameters")
    t.add_argument("--cpd-matrix", help="full conditional table TSV")
    t.add_argument("--cpd-marginals", help="marginals TSV paired with --cpd-matrix")
    t.add_argument("--edges", help="positive pairs TSV (child<TAB>parent), target 1")
    t.add_argument("--negatives", type=int, default=0,
                   help="corruptions per --edges positive")
    t.add_argument("--pairs", help="pairs TSV: child, parent, target[, neg flag]")
    t.add_argument("--soft-edges", help="soft edge TSV: t1, t2, P(t1|t2)")
    t.add_argument("--marginals", help="unary target TSV: concept, prob")
    t.add_argument("--dev-pairs", help="pairs TSV scored as dev loss per epoch")
    t.add_argument("--measure", choices=["uniform", "exponential"])
    t.add_argument("--poe", action="store_true", default=None,
                   help="pin box maxima to the support upper bound")
    for flag, typ in (
        ("--dim", int), ("--epochs", int), ("--batch-size", int), ("--seed", int),
        ("--learning-rate", float), ("--unary-weight", float),
        ("--edge-weight", float), ("--eps-min", float), ("--reg-weight", float),
    ):
        t.add_argument(flag, type=typ)
    t.add_argument("--init-min", type=float, nargs=2, metavar=("LO", "HI"),
                   help="range for initial box minima above the support floor")
    t.add_argument("--init-side", type=float, nargs=2, metavar=("LO", "HI"),
                   help="range for initial box side lengths")

    q = sub.add_parser("query", help="conditional probability with negations")
    q.add_argument("model")
    q.add_argument("--target", required=True, help="concept, may be !-negated")
    q.add_argument("--given", default="",
                   help="comma-separated evidence; prefix ! negates")

    e = sub.add_parser("eval", help="accuracy or probability metrics")
    e.add_argument("model")
    e.add_argument("--pairs", help="labeled pairs TSV: child, parent, label")
    e.add_argument("--dev", help="dev pairs TSV for threshold tuning")
    e.add_argument("--threshold", type=float)
    e.add_argument("--gold", help="gold probability TSV: child, parent, prob")
    e.add_argument("--calibration", help="write per-bin calibration TSV here")

    a = sub.add_parser("asymmetrize", help="score matrix to directed edges")
    a.add_argument("--scores", required=True, help="square score matrix TSV")
    a.add_argument("--out", required=True, help="edge list TSV to write")
    a.add_argument("--min-gap", type=float, default=0.0,
                   help="drop pairs whose |i,j vs j,i| gap is below this")
    a.add_argument("--check-acyclic", action="store_true")

    c = sub.add_parser("closure", help="transitive closure of a hierarchy")
    c.add_argument("--edges", required=True)
    c.add_argument("--out", required=True)

    m = sub.add_parser("marginals", help="per-node descendant-count marginals")
    m.add_argument("--edges", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--exclude-self", action="store_true")

    k = sub.add_parser("cpd", help="leaf co-occurrence conditional table")
    k.add_argument("--edges", required=True)
    k.add_argument("--out-matrix", required=True)
    k.add_argument("--out-marginals", required=True)

    r = sub.add_parser("prune-cpd", help="keep confidently directed soft edges")
    r.add_argument("--matrix", required=True)
    r.add_argument("--marginals", required=True)
    r.add_argument("--hi", type=float, default=0.6)
    r.add_argument("--lo", type=float, default=0.4)
    r.add_argument("--out", required=True)

    n = sub.add_parser("negatives", help="corruption-sample negative pairs")
    n.add_argument("--edges", required=True, help="positive closure TSV")
    n.add_argument("--k", type=int, default=1)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--out", required=True)

    y = sub.add_parser("toy", help="write the built-in toy ontology tables")
    y.add_argument("--out-matrix", required=True)
    y.add_argument("--out-marginals", required=True)

    g = sub.add_parser("plot", help="render a 2-D model as SVG")
    g.add_argument("model")
    g.add_argument("--out", required=True)
    return p


def _load_pairs(path):
    """Rows (child, parent, target, is_negative) from a pairs TSV."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) not in (3, 4):
                raise DataFormatError(
                    f"expected 'child<TAB>parent<TAB>target[<TAB>neg]', got {line!r}",
                    path, ln,
                )
            try:
                target = float(parts[2])
                neg = bool(int(parts[3])) if len(parts) == 4 else False
            except ValueError as exc:
                raise DataFormatError(str(exc), path, ln) from None
            rows.append((parts[0], parts[1], target, neg))
    return rows


def _save_pairs(path, examples):
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(f"{ex.b}\t{ex.a}\t{'%.12g' % ex.target}\t{int(ex.is_negative)}\n")


def _pairs_to_examples(rows):
    return [TrainExample.pair(v, u, t, is_negative=neg) for (u, v, t, neg) in rows]


def _train_config(args):
    file_cfg = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
    fields = (
        "dim", "epochs", "batch_size", "seed", "learning_rate",
        "unary_weight", "edge_weight", "eps_min", "reg_weight",
    )
    kw = {}
    for name in fields:
        flag = getattr(args, name)
        if flag is not None:
            kw[name] = flag
        elif name in file_cfg:
            kw[name] = file_cfg[name]
    poe = args.poe if args.poe is not None else bool(file_cfg.get("poe_mode", False))
    kw["poe_mode"] = poe
    measure_kind = args.measure or file_cfg.get("measure", "uniform")
    cfg = TrainConfig(**kw)
    if measure_kind == "uniform":
        measure = ProductMeasure.uniform(cfg.dim)
    else:
        measure = ProductMeasure.exponential(cfg.dim)
    init_kw = {}
    for flag, key, field_name in (
        (args.init_min, "init_min_range", "min_range"),
        (args.init_side, "init_side_range", "side_range"),
    ):
        if flag is not None:
            init_kw[field_name] = tuple(flag)
        elif key in file_cfg:
            init_kw[field_name] = tuple(file_cfg[key])
    init = InitSpec(**init_kw) if init_kw else None
    return cfg, measure, init


def _cmd_train(args):
    cfg, measure, init = _train_config(args)
    examples = []
    if args.cpd_matrix or args.cpd_marginals:
        if not (args.cpd_matrix and args.cpd_marginals):
            raise _Usage("--cpd-matrix and --cpd-marginals go together")
        table = cpdio.load_cpd(args.cpd_matrix, args.cpd_marginals)
        examples.extend(datasets.cpd_examples(table))
    if args.edges:
        edges = datasets.load_edges_tsv(args.edges)
        examples.extend(
            datasets.corrupt_negatives(edges, args.negatives, cfg.seed)
        )
    if args.pairs:
        examples.extend(_pairs_to_examples(_load_pairs(args.pairs)))
    if args.soft_edges:
        for (t1, t2, p) in datasets.load_soft_edges_tsv(args.soft_edges):
            examples.append(TrainExample.pair(t1, t2, p))
    if args.marginals:
        names, probs = cpdio.load_marginals_tsv(args.marginals)
        examples.extend(TrainExample.unary(n, p) for n, p in zip(names, probs))
    if not examples:
        raise _Usage("no training data given")
    dev = _pairs_to_examples(_load_pairs(args.dev_pairs)) if args.dev_pairs else None
    model, _ = fit(examples, cfg, measure=measure, init=init, dev=dev, log_fn=print)
    model.save(args.out)
    return 0


def _parse_concepts(spec):
    positives, negatives = [], []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if token.startswith("!"):
            negatives.append(token[1:].strip())
        else:
            positives.append(token)
    return positives, negatives


def _cmd_query(args):
    model = Model.load(args.model)
    pos, neg = _parse_concepts(args.given)
    tpos, tneg = _parse_concepts(args.target)
    if len(tpos) + len(tneg) != 1:
        raise _Usage("--target takes exactly one concept")
    if tpos:
        value = conditional_query(model, tpos[0], pos, neg)
    else:
        # Negated target: P(!t | evidence) = 1 - P(t | evidence).
        value = 1.0 - conditional_query(model, tneg[0], pos, neg)
    print("%.6g" % value)
    return 0


def _cmd_eval(args):
    model = Model.load(args.model)
    out = []
    if args.gold:
        rows = _load_pairs(args.gold)
        predicted = metrics.pair_scores(model, [(u, v) for (u, v, _, _) in rows])
        predicted = np.where(np.isfinite(predicted), predicted, 0.0)
        gold = [t for (_, _, t, _) in rows]
        kl, r = metrics.prob_metrics(predicted, gold)
        out += [("kl", kl), ("pearson", r)]
        if args.calibration:
            with open(args.calibration, "w", encoding="utf-8") as fh:
                fh.write("lo\thi\tcount\tmean_pred\tmean_gold\tpearson\n")
                for row in metrics.calibration_bins(predicted, gold):
                    fh.write("\t".join("%.12g" % v for v in row) + "\n")
    if args.pairs:
        test = _load_pairs(args.pairs)
        if args.threshold is not None:
            t = args.threshold
        elif args.dev:
            t, dev_acc = metrics.sweep_threshold(model, _load_pairs(args.dev))
            out.append(("dev_accuracy", dev_acc))
        else:
            t, _ = metrics.sweep_threshold(model, test)
        acc = metrics.classify_accuracy(model, test, t)
        out += [("threshold", t), ("accuracy", acc)]
    if not out:
        raise _Usage("nothing to evaluate: pass --pairs and/or --gold")
    for name, value in out:
        print(f"{name}\t{'%.6g' % value}")
    return 0


def _cmd_asymmetrize(args):
    names, scores = cpdio.load_matrix_tsv(args.scores)
    graph = dag.asymmetrize(scores, names=names, min_gap=args.min_gap)
    graph.save_tsv(args.out)
    if args.check_acyclic:
        ok, cycle = dag.is_acyclic(graph)
        if not ok:
            labels = [graph.label(v) for v in cycle]
            print("cycle: " + " -> ".join(labels + [labels[0]]))
            return 2
    return 0


def _cmd_closure(args):
    h = datasets.Hierarchy.from_edges(datasets.load_edges_tsv(args.edges))
    datasets.save_edges_tsv(args.out, datasets.transitive_closure(h))
    return 0


def _cmd_marginals(args):
    h = datasets.Hierarchy.from_edges(datasets.load_edges_tsv(args.edges))
    marg = datasets.node_marginals(h, include_self=not args.exclude_self)
    cpdio.save_marginals_tsv(args.out, h.nodes, [marg[n] for n in h.nodes])
    return 0


def _cmd_cpd(args):
    h = datasets.Hierarchy.from_edges(datasets.load_edges_tsv(args.edges))
    table = datasets.leaf_cooccurrence_cpd(h)
    cpdio.save_cpd(args.out_matrix, args.out_marginals, table)
    return 0


def _cmd_prune(args):
    table = cpdio.load_cpd(args.matrix, args.marginals)
    datasets.save_soft_edges_tsv(args.out, datasets.prune_cpd(table, args.hi, args.lo))
    return 0


def _cmd_negatives(args):
    edges = datasets.load_edges_tsv(args.edges)
    examples = datasets.corrupt_negatives(edges, args.k, args.seed)
    _save_pairs(args.out, examples)
    return 0


def _cmd_toy(args):
    table = datasets.toy_dataset(datasets.default_toy())
    cpdio.save_cpd(args.out_matrix, args.out_marginals, table)
    return 0


def _cmd_plot(args):
    model = Model.load(args.model)
    svg = plotting.render_svg(model)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "query": _cmd_query,
    "eval": _cmd_eval,
    "asymmetrize": _cmd_asymmetrize,
    "closure": _cmd_closure,
    "marginals": _cmd_marginals,
    "cpd": _cmd_cpd,
    "prune-cpd": _cmd_prune,
    "negatives": _cmd_negatives,
    "toy": _cmd_toy,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return 1
    except TrainingDiverged as exc:
        print(f"boxlat: divergence: {exc}", file=sys.stderr)
        return 3
    except (BoxlatError, OSError, ValueError) as exc:
        print(f"boxlat: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
