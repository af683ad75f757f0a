"""Timing rehearsal for the 10k-node hierarchy benchmark."""

import time

from boxlat import (
    TrainConfig,
    TrainExample,
    classify_accuracy,
    corrupt_negatives,
    fit,
    node_marginals,
    random_hierarchy,
    split_closure,
    sweep_threshold,
    transitive_closure,
)


def labeled_pairs(split_edges, closure, vocab, seed):
    ex = corrupt_negatives(split_edges, k=1, seed=seed, known=closure, vocab=vocab)
    return [(e.b, e.a, int(e.target)) for e in ex]


def main():
    t0 = time.time()
    h = random_hierarchy(10_000, seed=0)
    closure = transitive_closure(h)
    print(f"nodes 10000, closure edges {len(closure)} ({time.time()-t0:.1f}s)")

    train_e, dev_e, test_e = split_closure(closure, 4000, 4000, seed=0)
    vocab = h.nodes
    marg = node_marginals(h)

    t0 = time.time()
    train_ex = corrupt_negatives(train_e, k=1, seed=1, known=closure, vocab=vocab)
    train_ex += [TrainExample.unary(n, marg[n]) for n in vocab]
    dev_pairs = labeled_pairs(dev_e, closure, vocab, seed=2)
    test_pairs = labeled_pairs(test_e, closure, vocab, seed=3)
    print(f"{len(train_ex)} train examples ({time.time()-t0:.1f}s)")

    results = {}
    for tag, cfg in [
        ("box", TrainConfig()),
        ("poe", TrainConfig(dim=100, poe_mode=True)),
    ]:
        t0 = time.time()
        model, hist = fit(train_ex, cfg)
        t_train = time.time() - t0
        t0 = time.time()
        thr, dev_acc = sweep_threshold(model, dev_pairs)
        acc = classify_accuracy(model, test_pairs, thr)
        t_eval = time.time() - t0
        results[tag] = acc
        print(f"{tag}: dim {cfg.dim} train {t_train:.1f}s eval {t_eval:.1f}s "
              f"loss {hist[-1]['loss']:.4f} thr {thr:.4g} "
              f"dev_acc {dev_acc:.4f} test_acc {acc:.4f}")

    print(f"box {results['box']:.4f} vs poe {results['poe']:.4f} "
          f"(box wins: {results['box'] > results['poe']})")


if __name__ == "__main__":
    main()
