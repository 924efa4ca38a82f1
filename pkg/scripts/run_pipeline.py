"""End-to-end experiment on the cluster benchmark.

Trains a map, reads off the semantic model and its knowledge base, verifies
the order axioms and entailment postulates, and replays a shorter training
run as a stepwise revision trace.  All artifacts land in --out; a compact
summary is printed as it goes.
"""

import argparse
import os

from somlogic import (
    TrainConfig,
    build_model,
    build_preferential,
    derive_specificity,
    extract_kb,
    feature_range,
    inclusion_text,
    init_map,
    kb_file_text,
    quantization_error,
    run_trace,
    save_map,
    save_model,
    three_cluster_dataset,
    train,
    verify_klm,
    verify_order_axioms,
)
from somlogic import jsonio
from somlogic.checker import specificity_to_json
from somlogic.revision import trace_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/demo", help="artifact directory")
    ap.add_argument("--rows", type=int, default=6)
    ap.add_argument("--cols", type=int, default=6)
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trace-epochs", type=int, default=5,
                    help="epochs for the revision-trace replay")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    data = three_cluster_dataset()
    cfg = TrainConfig(epochs=args.epochs, lr_start=0.7, lr_end=0.05,
                      radius_start=3.0, radius_end=0.5, seed=args.seed)
    som0 = init_map(args.rows, args.cols, data[0].dim, args.seed, feature_range(data))
    qe0 = quantization_error(som0, data)
    som, qe_log = train(som0, data, cfg)
    print(f"trained {args.rows}x{args.cols} map, {args.epochs} epochs: "
          f"quantization error {qe0:.4f} -> {qe_log[-1]:.4f}")
    save_map(os.path.join(args.out, "map.json"), som)

    model = build_model(som, data)
    extraction = extract_kb(model)
    save_model(os.path.join(args.out, "model.json"), model)
    with open(os.path.join(args.out, "kb.txt"), "w", encoding="utf-8") as fh:
        fh.write(kb_file_text(extraction))
    rel = derive_specificity(model)
    jsonio.dump_file(os.path.join(args.out, "specificity.json"), specificity_to_json(rel))

    print(f"\nknowledge base ({len(extraction.kb)} inclusions):")
    for inc in sorted(extraction.kb, key=inclusion_text):
        if inc.kind == "strict":
            print(f"  {inclusion_text(inc)}")
    for inc, degree in extraction.ranked_defeasible:
        print(f"  {inclusion_text(inc)}   degree={degree:.4f}")
    if rel.pairs:
        print("specificity: " + ", ".join(f"{a} > {b}" for a, b in sorted(rel.pairs)))
    else:
        print("specificity: (empty)")

    pref = build_preferential(model, rel)
    print("\nverification:")
    for chk in verify_order_axioms(pref) + verify_klm(pref):
        tag = "" if chk.required else "  [informational]"
        print(f"  {chk.check}: {chk.status}{tag}")

    trace_cfg = TrainConfig(epochs=args.trace_epochs, lr_start=0.7, lr_end=0.05,
                            radius_start=3.0, radius_end=0.5, seed=args.seed)
    state, steps = run_trace(data, trace_cfg, args.rows, args.cols)
    with open(os.path.join(args.out, "trace.jsonl"), "w", encoding="utf-8") as fh:
        fh.write(trace_text(steps))
    changed = [s for s in steps if s.added or s.removed]
    print(f"\nrevision trace: {len(steps)} presentations, "
          f"{len(changed)} changed the knowledge base")
    for s in changed[:8]:
        gained = ", ".join(sorted(inclusion_text(i) for i in s.added)) or "-"
        lost = ", ".join(sorted(inclusion_text(i) for i in s.removed)) or "-"
        print(f"  step {s.step_index:4d} ({s.stimulus.sid}): +[{gained}] -[{lost}]")
    if len(changed) > 8:
        print(f"  ... {len(changed) - 8} more")
    print(f"\nartifacts in {args.out}/")


if __name__ == "__main__":
    main()
