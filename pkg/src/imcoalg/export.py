"""DOT and JSON export.

DOT dialect: one node per element, label verbatim; solid arrows for order
covers (low to high), dashed arrows for the modal relation. Complexes and
free-stage sequences render one cluster per stage with dashed arrows for
the connecting maps. JSON documents carry schema tag "imcoalg/1" and
mirror the frame file sections plus whatever was computed.

All output is sorted by element index, so identical inputs produce
byte-identical files.
"""

import json

from .poset import format_label, iter_bits

JSON_SCHEMA = "imcoalg/1"


def _quote(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def poset_dot_lines(poset, prefix="", indent="  "):
    names = [prefix + format_label(lab) for lab in poset.labels]
    lines = [f"{indent}{_quote(name)};" for name in names]
    for i, j in poset.covers():
        lines.append(f"{indent}{_quote(names[i])} -> {_quote(names[j])};")
    return names, lines


def frame_to_dot(frame, graph_name="imcoalg"):
    names, lines = poset_dot_lines(frame.poset)
    for x in range(frame.poset.n):
        for y in iter_bits(frame.rel[x]):
            lines.append(
                f"  {_quote(names[x])} -> {_quote(names[y])} [style=dashed];"
            )
    return "digraph " + graph_name + " {\n" + "\n".join(lines) + "\n}\n"


def complex_to_dot(cx, graph_name="complex"):
    out = ["digraph " + graph_name + " {"]
    all_names = []
    for i, stage in enumerate(cx.stages):
        names, lines = poset_dot_lines(stage, prefix=f"P{i}:", indent="    ")
        all_names.append(names)
        out.append(f"  subgraph cluster_{i} {{")
        out.append(f'    label="stage {i}";')
        out.extend(lines)
        out.append("  }")
    for i in range(1, len(cx.stages)):
        r = cx.root_maps[i]
        for src in range(cx.stages[i].n):
            out.append(
                f"  {_quote(all_names[i][src])} -> "
                f"{_quote(all_names[i - 1][r.assign[src]])} [style=dashed];"
            )
    out.append("}")
    return "\n".join(out) + "\n"


def free_stages_to_dot(stages, graph_name="freealg"):
    out = ["digraph " + graph_name + " {"]
    all_names = []
    for stage in stages:
        names, lines = poset_dot_lines(
            stage.poset, prefix=f"M{stage.index}:", indent="    "
        )
        all_names.append(names)
        out.append(f"  subgraph cluster_{stage.index} {{")
        out.append(f'    label="stage {stage.index}";')
        out.extend(lines)
        out.append("  }")
    for stage in stages:
        if stage.rel is None:
            continue
        k = stage.index
        for e in range(stage.poset.n):
            for y in iter_bits(stage.rel[e]):
                out.append(
                    f"  {_quote(all_names[k][e])} -> "
                    f"{_quote(all_names[k - 1][y])} [style=dashed];"
                )
    out.append("}")
    return "\n".join(out) + "\n"


def frame_to_json_dict(frame, valuations=None, nbhd=None, computed=None):
    p = frame.poset
    doc = {
        "schema": JSON_SCHEMA,
        "elements": [format_label(lab) for lab in p.labels],
        "order": [
            [format_label(p.labels[i]), format_label(p.labels[j])]
            for i, j in p.covers()
        ],
        "modal": [
            [format_label(a), format_label(b)] for a, b in frame.pairs()
        ],
    }
    if valuations:
        doc["val"] = {
            letter: [format_label(p.labels[i]) for i in iter_bits(mask)]
            for letter, mask in sorted(valuations.items())
        }
    if nbhd is not None:
        doc["nbhd"] = nbhd
    if computed is not None:
        doc["computed"] = computed
    return doc


def complex_to_json_dict(cx):
    stages = []
    for i, stage in enumerate(cx.stages):
        entry = {
            "index": i,
            "size": stage.n,
            "elements": [format_label(lab) for lab in stage.labels],
        }
        if i >= 1:
            r = cx.root_maps[i]
            entry["root_map"] = {
                format_label(stage.labels[s]): format_label(
                    cx.stages[i - 1].labels[r.assign[s]]
                )
                for s in range(stage.n)
            }
        stages.append(entry)
    return {"schema": JSON_SCHEMA, "stages": stages}


def free_stages_to_json_dict(stages):
    doc = {"schema": JSON_SCHEMA, "stages": []}
    for stage in stages:
        entry = {
            "index": stage.index,
            "size": stage.poset.n,
            "inner_depth": stage.inner_depth,
            "elements": [format_label(lab) for lab in stage.poset.labels],
            "projection": {
                format_label(stage.poset.labels[e]): format_label(
                    stage.projection.target.labels[stage.projection.assign[e]]
                )
                for e in range(stage.poset.n)
            },
        }
        if stage.rel is not None:
            entry["step_relation"] = {
                format_label(stage.poset.labels[e]): [
                    format_label(stage.prev.labels[y])
                    for y in iter_bits(stage.rel[e])
                ]
                for e in range(stage.poset.n)
            }
        doc["stages"].append(entry)
    return doc


def dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
