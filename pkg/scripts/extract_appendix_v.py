"""Regenerate the raw n = 6 fixture from its LaTeX source.

    python scripts/extract_appendix_v.py SOURCE.md [OUT]

Vectors are written as ``[0,1,...]`` and matrices as ``array{cccccc}``
blocks in the source. Nothing is repaired here; the clean file is
maintained by hand with a comment on every changed line.
"""

import re
import sys
from pathlib import Path

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "nlbox" / "data" / "appendix_v_raw.txt"


def vecs(s):
    return ["".join(v.split(",")) for v in re.findall(r"\[([01](?:,[01])+)\]", s)]


def mats(s):
    out = []
    for m in re.findall(r"\\begin\{array\}\{cccccc\}(.*?)\\end\{array\}", s, re.S):
        out.append(["".join(r.split("&")).replace(" ", "").strip() for r in m.split("\\\\") if r.strip()])
    return out


def extract(text: str) -> str:
    sec = text[text.index(r"\section{An explicit representation"):]
    head = sec[: sec.index("The elements of the first")]
    inputs = vecs(head[: head.index("Boolean translation space")])
    trans = vecs(head[head.index("Boolean translation space") : head.index("The rotation matrices")])
    parts = re.split(r"The elements of the (\w+) sub-space", sec)
    out = [
        "# n = 6 input space, translation space and symmetry subsets.",
        "# Transcribed verbatim, including the typographical anomalies.",
        "",
        "[inputs]", *inputs, "",
        "[translations]", *trans, "",
    ]
    for m, body in enumerate(parts[2::2], 1):
        xs = vecs(body[: body.index("mathcal{T}")])
        ts = vecs(body[body.index("mathcal{T}") : body.index("mathcal{R}")])
        out += [f"[subset {m}]", "T:", *ts, "X:", *xs, "R:"]
        for M in mats(body):
            out += M
            out.append("")
        if out[-1] == "":
            out.pop()
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def main(argv):
    if not argv:
        print(__doc__)
        return 2
    out = Path(argv[1]) if len(argv) > 1 else DEFAULT_OUT
    out.write_text(extract(Path(argv[0]).read_text()))
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
