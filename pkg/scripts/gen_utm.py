"""Regenerate the shipped universal machine file from its rule generator."""

from __future__ import annotations

import argparse
from pathlib import Path

from memtm.utm import utm_text

DEFAULT = Path(__file__).resolve().parents[1] / "src" / "memtm" / "machines" / "utm.tm"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT)
    ap.add_argument("--check", action="store_true", help="exit 1 if the file is stale instead of writing")
    args = ap.parse_args()
    text = utm_text()
    if args.check:
        stale = not args.out.exists() or args.out.read_text() != text
        print(f"{args.out}: {'stale' if stale else 'up to date'}")
        raise SystemExit(int(stale))
    args.out.write_text(text)
    print(f"wrote {args.out} ({len(text.splitlines())} lines)")


if __name__ == "__main__":
    main()
