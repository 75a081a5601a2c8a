"""Build the bundled English tag lexicon.

Takes the Brill lexicon and the word-frequency list shipped with TextBlob
(``textblob/en/en-lexicon.txt`` and ``en-spelling.txt``, MIT licensed), keeps
the N most frequent lowercase words and maps their most likely Penn tag onto
the coarse tag set used by the keyword extractor.

    python scripts/build_lexicon.py /path/to/textblob/en --size 5000
"""
import argparse
import hashlib
import json
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "scholnet" / "data"


def coarse(penn: str) -> str:
    if penn.startswith("NN"):
        return "NOUN"
    if penn.startswith("JJ"):
        return "ADJ"
    if penn == "VBG":
        return "GER"
    return "OTHER"


def read_pairs(path: Path):
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith(";;;"):
            continue
        yield line.split()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("textblob_en", type=Path)
    ap.add_argument("--size", type=int, default=5000)
    args = ap.parse_args()

    lexicon = {}
    for parts in read_pairs(args.textblob_en / "en-lexicon.txt"):
        word, tag = parts[0], parts[1]
        if word.isalpha() and word == word.lower() and len(word) >= 2:
            lexicon.setdefault(word, coarse(tag))

    freq = {}
    for parts in read_pairs(args.textblob_en / "en-spelling.txt"):
        freq[parts[0]] = int(parts[1])

    ranked = sorted((w for w in lexicon if w in freq), key=lambda w: (-freq[w], w))
    kept = sorted(ranked[: args.size])
    out = DATA / "lexicon_en.tsv"
    out.write_text("".join(f"{w}\t{lexicon[w]}\n" for w in kept), encoding="utf-8")
    print(f"wrote {len(kept)} entries to {out}")

    sums = {}
    for name in ("stopwords_en.txt", "stopwords_fr.txt", "lexicon_en.tsv"):
        path = DATA / name
        if path.exists():
            sums[name] = hashlib.sha256(path.read_bytes()).hexdigest()
    (DATA / "checksums.json").write_text(json.dumps(sums, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
