"""Regenerate the bundled planted-topic mini-corpus under src/scholnet/data/minicorpus."""
import argparse
import json
from pathlib import Path

from scholnet.corpus import save_store
from scholnet.synthetic import planted_topic_corpus

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "scholnet" / "data" / "minicorpus"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    planted = planted_topic_corpus(seed=args.seed)
    save_store(planted.corpus, args.out)
    (args.out / "seeds.txt").write_text("".join(f"{s}\n" for s in sorted(planted.corpus.seed_ids)),
                                        encoding="utf-8")
    (args.out / "manifest.json").write_text(json.dumps(planted.manifest, indent=2, sort_keys=True) + "\n",
                                            encoding="utf-8")
    print(f"wrote {len(planted.corpus)} references, {len(planted.corpus.links)} links to {args.out}")


if __name__ == "__main__":
    main()
