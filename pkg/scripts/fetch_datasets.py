#!/usr/bin/env python3
"""Download the political-books and political-blogs networks and convert
them into the edge-list/label format this package reads.

Needs network access. Writes into data/:

  books_edges.txt  books_labels.txt   (undirected; load with --undirected)
  blogs_edges.txt  blogs_labels.txt   (directed; largest weakly connected
                                       component, vertices relabeled 0..n-1)

Book labels map liberal/neutral/conservative to groups 0/1/2; blog labels
keep 0 = liberal, 1 = conservative.
"""

import io
import re
import sys
import urllib.request
import zipfile
from collections import deque
from pathlib import Path

BOOKS_URL = "https://websites.umich.edu/~mejn/netdata/polbooks.zip"
BLOGS_URL = "https://websites.umich.edu/~mejn/netdata/polblogs.zip"
DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def fetch_zip_member(url: str, suffix: str) -> str:
    print(f"downloading {url} ...")
    raw = urllib.request.urlopen(url, timeout=60).read()
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        for name in zf.namelist():
            if name.endswith(suffix):
                return zf.read(name).decode("utf-8", errors="replace")
    raise RuntimeError(f"no {suffix} member in {url}")


def parse_gml(text: str):
    """Minimal parser for the flat node/edge GML these archives use."""
    nodes, edges = [], []
    for block in re.finditer(r"node\s*\[(.*?)\]", text, re.S):
        body = block.group(1)
        nid = int(re.search(r"\bid\s+(\d+)", body).group(1))
        value = re.search(r"\bvalue\s+\"?([^\s\"]+)\"?", body)
        nodes.append((nid, value.group(1) if value else ""))
    for block in re.finditer(r"edge\s*\[(.*?)\]", text, re.S):
        body = block.group(1)
        s = int(re.search(r"\bsource\s+(\d+)", body).group(1))
        t = int(re.search(r"\btarget\s+(\d+)", body).group(1))
        edges.append((s, t))
    return nodes, edges


def write_books():
    text = fetch_zip_member(BOOKS_URL, ".gml")
    nodes, edges = parse_gml(text)
    group_of = {"l": 0, "n": 1, "c": 2}
    ids = sorted(nid for nid, _ in nodes)
    remap = {nid: i for i, nid in enumerate(ids)}
    labels = {remap[nid]: group_of[val] for nid, val in nodes}
    (DATA_DIR / "books_edges.txt").write_text(
        "".join(f"{remap[s]} {remap[t]}\n" for s, t in edges)
    )
    (DATA_DIR / "books_labels.txt").write_text(
        "".join(f"{i} {labels[i]}\n" for i in range(len(ids)))
    )
    print(f"books: {len(ids)} vertices, {len(edges)} undirected edges")


def largest_wcc(n, edges):
    adj = [[] for _ in range(n)]
    for s, t in edges:
        adj[s].append(t)
        adj[t].append(s)
    seen = [False] * n
    best = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        if len(comp) > len(best):
            best = comp
    return sorted(best)


def write_blogs():
    text = fetch_zip_member(BLOGS_URL, ".gml")
    nodes, edges = parse_gml(text)
    ids = sorted(nid for nid, _ in nodes)
    remap = {nid: i for i, nid in enumerate(ids)}
    value = {remap[nid]: int(val) for nid, val in nodes}
    dir_edges = [(remap[s], remap[t]) for s, t in edges]
    keep = largest_wcc(len(ids), dir_edges)
    sub = {v: i for i, v in enumerate(keep)}
    (DATA_DIR / "blogs_edges.txt").write_text(
        "".join(f"{sub[s]} {sub[t]}\n" for s, t in dir_edges if s in sub and t in sub)
    )
    (DATA_DIR / "blogs_labels.txt").write_text(
        "".join(f"{sub[v]} {value[v]}\n" for v in keep)
    )
    print(f"blogs: {len(keep)} vertices in the largest weakly connected component")


def main() -> int:
    DATA_DIR.mkdir(exist_ok=True)
    try:
        write_books()
        write_blogs()
    except OSError as exc:
        print(f"download failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
