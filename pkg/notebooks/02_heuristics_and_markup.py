"""
Rules and explicit markup
=========================

Two metadata-only ways of finding relationships: schema.org ``sameAs`` /
``isBasedOn`` links, and string rules over normalized names.
"""

import json

from datarel.heuristics import classify_pair_heuristic
from datarel.ingest import ingest_corpus
from datarel.markup import extract_explicit

objs = [
    {"@id": "sed", "name": "Survey of Earned Doctorates", "url": "https://nsf.gov/sed",
     "description": "Annual census of research doctorates awarded by US institutions."},
    {"@id": "sed-mirror", "name": "Survey of Earned Doctorates", "url": "https://data.gov/sed",
     "description": "Annual census of research doctorates awarded by US institutions.",
     "sameAs": "https://nsf.gov/sed"},
    {"@id": "sed-2019", "name": "Survey of Earned Doctorates - 2019", "url": "https://nsf.gov/sed19"},
    {"@id": "sed-analysis", "name": "Analysis of Survey of Earned Doctorates",
     "url": "https://stats.example.org/a", "isBasedOn": "https://nsf.gov/sed"},
    {"@id": "sst-v4", "name": "Aquarius SST Annual V4", "url": "https://podaac.org/v4"},
    {"@id": "sst-v5", "name": "Aquarius SST Annual V5", "url": "https://podaac.org/v5"},
    {"@id": "sst-m", "name": "Aquarius SST - monthly", "url": "https://podaac.org/m"},
    {"@id": "sst-d", "name": "Aquarius SST - daily", "url": "https://podaac.org/d"},
]
corpus = ingest_corpus([json.dumps(o) for o in objs])
norm = corpus.normalized

# %%
# Markup: only what publishers declared
res = extract_explicit(corpus)
for e in res.edges:
    print(f"markup     {e.src_id:14} -> {e.dst_id:14} {e.rel.value}")
print("dangling references:", res.dangling)

# %%
# Heuristics: precedence Replica > Version > Subset > Derived > Variant
pairs = [("sed", "sed-mirror"), ("sst-v4", "sst-v5"), ("sed-2019", "sed"),
         ("sed-analysis", "sed"), ("sst-m", "sst-d"), ("sst-v4", "sed")]
for a, b in pairs:
    label = classify_pair_heuristic(norm[a], norm[b])
    arrow = {1: "->", -1: "<-", 0: "--"}[label.direction]
    print(f"heuristic  {a:14} {arrow} {b:14} {label.rel.value}")

# %%
# A replica needs two different sites: the same record twice on one host is not one
twin = json.dumps({"@id": "sed-copy", "name": "Survey of Earned Doctorates",
                   "url": "https://nsf.gov/sed-copy",
                   "description": objs[0]["description"]})
c2 = ingest_corpus([json.dumps(objs[0]), twin])
print(classify_pair_heuristic(c2.normalized["sed"], c2.normalized["sed-copy"]))
