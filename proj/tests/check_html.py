#!/usr/bin/env python3
"""Parse every .html file in a directory as XML; fail on the first error."""
import pathlib
import sys
import xml.etree.ElementTree as ET


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: check_html.py DIR", file=sys.stderr)
        return 2
    files = sorted(pathlib.Path(sys.argv[1]).glob("*.html"))
    if not files:
        print(f"no html files in {sys.argv[1]}", file=sys.stderr)
        return 1
    bad = 0
    for f in files:
        try:
            root = ET.parse(f).getroot()
            if root.tag.rsplit("}", 1)[-1] != "html":
                raise ValueError(f"root element is <{root.tag}>")
        except (ET.ParseError, ValueError) as e:
            print(f"{f.name}: {e}")
            bad += 1
        else:
            print(f"{f.name}: ok")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
