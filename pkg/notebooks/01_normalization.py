"""
Normalizing dataset names
=========================

Every method downstream compares names after the same deterministic
clean-up.  This script walks through it on a few catalog titles.
"""

from datarel.model import (
    DatasetRecord,
    canonical_ref,
    extract_temporal_tokens,
    extract_version_token,
    normalize_record,
    normalize_text,
    split_prefix_suffix,
)

# %%
# Compatibility folding, lowercasing, punctuation to spaces
for raw in ["Survey of Earned Doctorates - 2019", "  Annual   V4 ", "Ｆｕｌｌ_Width"]:
    print(f"{raw!r:40} -> {normalize_text(raw)!r}")

# %%
# URLs and DOIs collapse to one canonical spelling; junk is flagged
for raw in ["https://doi.org/10.5061/ABC", "HTTP://Example.org/data/", "not a url"]:
    print(f"{raw!r:35} -> {canonical_ref(raw)}")

# %%
# Version numbers: the rightmost token wins, the rest of the name is kept
print(extract_version_token("annual v4"))
print(extract_version_token("gridded sst version 2.1"))
print(extract_version_token("weather stations ohio"))

# %%
# Years, month names and numeric dates
print(extract_temporal_tokens("sales january 2020"))
print(extract_temporal_tokens("route 66 traffic"))  # 66 is not a year

# %%
# Prefix / suffix on the last delimiter
print(split_prefix_suffix("Agency: Program - 2019"))
print(split_prefix_suffix("Survey of Earned Doctorates"))

# %%
# All of the above, bundled per record
rec = DatasetRecord(id="sed-2019", name="Survey of Earned Doctorates - 2019",
                    page_url="https://nsf.gov/sed", host="nsf.gov")
for key, value in vars(normalize_record(rec)).items():
    if key != "derivation_patterns":
        print(f"{key:18} {value!r}")
