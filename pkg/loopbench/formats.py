"""Input file loaders and dumpers.

Digraph files are JSON ({"vertices": m, "edges": [[u, v], ...], "undirected": false})
or text: the vertex count on the first line, then one "u v" edge per line;
blank lines and lines starting with "#" are skipped. Operation files are
JSON ({"arity": n, "domain": m, "table": [...]}) with the table in
lexicographic argument order. An alpha file is a JSON n x n array.

Reports are written as JSON lines, which are the machine-readable output.
The "--format text" rendering of a report is for display only and has no
loader here.
"""

import json
from pathlib import Path
from typing import List, Tuple, Union

from pydantic import TypeAdapter, ValidationError

from loopbench.algebra import OpTable, builtin
from loopbench.digraph import Digraph
from loopbench.errors import InvalidInput, ParseError
from loopbench.models import DigraphFile, OpTableFile

PathLike = Union[str, Path]

_ALPHA = TypeAdapter(List[List[int]])


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(path), "0:0", f"cannot read file: {exc.strerror}")


def _json(path: PathLike, text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(path), f"{exc.lineno}:{exc.colno}", exc.msg)


def _field_error(path: PathLike, exc: ValidationError) -> ParseError:
    err = exc.errors()[0]
    position = ".".join(str(p) for p in err["loc"]) or "$"
    return ParseError(str(path), position, err["msg"])


def parse_digraph_text(text: str, path: PathLike = "<text>", undirected: bool = False) -> Digraph:
    count = None
    edges: List[Tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        nums = []
        for p in parts:
            try:
                nums.append(int(p))
            except ValueError:
                col = raw.index(p) + 1
                raise ParseError(str(path), f"{lineno}:{col}", f"expected an integer, got {p!r}")
        if count is None:
            if len(nums) != 1:
                raise ParseError(str(path), f"{lineno}:1", "first line must hold the vertex count")
            count = nums[0]
        elif len(nums) != 2:
            raise ParseError(str(path), f"{lineno}:1", f"edge lines need two vertices, got {len(nums)}")
        else:
            edges.append((nums[0], nums[1]))
    if count is None:
        raise ParseError(str(path), "1:1", "missing vertex count")
    return _build_digraph(path, count, edges, undirected)


def _build_digraph(path: PathLike, count: int, edges, undirected: bool) -> Digraph:
    try:
        if undirected:
            return Digraph.undirected_from(count, edges)
        return Digraph(count, frozenset(edges))
    except InvalidInput as exc:
        raise ParseError(str(path), "$", exc.detail)


def load_digraph(path: PathLike, undirected: bool = False) -> Digraph:
    """Read a digraph; ``undirected`` symmetrizes the edge list."""
    text = _read(path)
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        try:
            data = DigraphFile.model_validate(_json(path, text))
        except ValidationError as exc:
            raise _field_error(path, exc)
        return _build_digraph(path, data.vertices, data.edges, undirected or data.undirected)
    return parse_digraph_text(text, path, undirected)


def dump_digraph(g: Digraph) -> str:
    return DigraphFile(vertices=g.vertex_count, edges=g.sorted_edges(), undirected=g.undirected).model_dump_json()


def dump_digraph_text(g: Digraph) -> str:
    """Text digraph form read back by parse_digraph_text; every edge is listed, both directions for undirected graphs."""
    return f"{g.vertex_count}\n" + "".join(f"{u} {v}\n" for u, v in g.sorted_edges())


def load_op(path: PathLike) -> OpTable:
    text = _read(path)
    try:
        data = OpTableFile.model_validate(_json(path, text))
    except ValidationError as exc:
        raise _field_error(path, exc)
    try:
        return OpTable(data.arity, data.domain, tuple(data.table), Path(path).stem)
    except InvalidInput as exc:
        raise ParseError(str(path), "table", exc.detail)


def dump_op(t: OpTable) -> str:
    return OpTableFile(arity=t.arity, domain=t.domain_size, table=list(t.table)).model_dump_json()


def load_builtin(key: str) -> OpTable:
    try:
        return builtin(key)
    except InvalidInput as exc:
        raise ParseError("--op-builtin", key, exc.detail)


def load_alpha(path: PathLike) -> List[List[int]]:
    text = _read(path)
    try:
        return _ALPHA.validate_python(_json(path, text))
    except ValidationError as exc:
        raise _field_error(path, exc)


def parse_subset(text: str) -> List[int]:
    """Comma-separated vertices, e.g. "0,1"."""
    items = [s.strip() for s in text.split(",")]
    values = []
    for k, item in enumerate(items):
        try:
            values.append(int(item))
        except ValueError:
            raise ParseError("--subset", f"item {k}", f"expected an integer, got {item!r}")
    return values
