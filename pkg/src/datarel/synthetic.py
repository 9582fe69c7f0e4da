"""Seeded synthetic corpora with planted relationships and gold labels.

Every base record belongs to a family.  A family receives at most one planted
relationship (replica, version, subset, variant or derived), so gold labels
are unambiguous by construction; ``None`` pairs are drawn across families,
half of them "hard" (sharing an agency, measure or region word).
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from typing import Optional

from .ingest import Corpus, build_corpus, record_to_jsonld
from .model import (
    DEFAULT_DERIVATION_PATTERNS,
    DatasetRecord,
    Label,
    LabeledPair,
    Relation,
    canonicalize_url,
    host_of,
)

AGENCIES = (
    "NOAA", "Census Bureau", "NSF", "USGS", "EPA", "NASA", "BLS", "CDC", "USDA", "NIH",
    "DOE", "FEMA", "Eurostat", "OECD", "World Bank", "WHO", "UNICEF", "ESA", "NCAR", "NREL",
)
MEASURES = (
    "Rainfall", "Sea Surface Temperature", "Household Income", "Air Quality",
    "Earned Doctorates", "Crop Yield", "Unemployment Rate", "Wildfire Perimeters",
    "Groundwater Levels", "Traffic Counts", "School Enrollment", "Hospital Admissions",
    "Bird Migration Counts", "Soil Moisture", "Electricity Consumption", "Snow Depth",
    "Ozone Concentration", "Population Estimates", "Median Rent", "Stream Discharge",
    "Fish Catch", "Vaccination Coverage", "Broadband Access", "Building Permits",
    "Tree Canopy Cover",
)
REGIONS = (
    "Ohio", "California", "Texas", "Alaska", "Oregon", "Florida", "Maine", "Nevada",
    "Kansas", "Utah", "Iowa", "Vermont", "Montana", "Georgia", "Arizona", "Colorado",
    "Idaho", "Kentucky", "Nebraska", "Wyoming", "North Atlantic", "Gulf Coast",
    "Great Lakes", "Pacific Northwest", "New England",
)
KNOWN_HOSTS = (
    "data.gov", "catalog.data.gov", "zenodo.org", "figshare.com", "dataverse.harvard.edu",
    "pangaea.de", "kaggle.com", "data.europa.eu", "datadryad.org", "ncei.noaa.gov",
)
GRANULARITIES = ("Annual", "Monthly", "Daily", "Weekly", "Hourly", "Quarterly")
SUBAREAS = ("County Level", "Northern District", "Coastal Zone", "Urban Areas",
            "Rural Areas", "Tribal Lands")
MONTH_NAMES = ("January", "February", "March", "April", "May", "June", "July",
               "August", "September", "October", "November", "December")
ABBREVIATIONS = {
    "temperature": "temp", "estimates": "est", "concentration": "conc",
    "consumption": "use", "enrollment": "enrolment", "admissions": "admits",
    "discharge": "flow", "coverage": "cov", "population": "pop", "permits": "permit",
    "counts": "count", "levels": "level", "perimeters": "perimeter",
}
FILLER_SENTENCES = (
    "Values are provided as comma separated files with a data dictionary.",
    "Quality control flags accompany every observation.",
    "Records were compiled from field surveys and administrative sources.",
    "Missing values are coded explicitly and documented in the readme.",
    "The collection is updated when new observations are validated.",
    "Spatial units follow the official boundary definitions in use at release.",
)
PLANT_TYPES = ("replica", "version", "subset", "variant", "derived")


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int
    base_count: int = 2000
    replica_rate: float = 0.25
    version_rate: float = 0.06
    subset_rate: float = 0.08
    variant_rate: float = 0.06
    derived_rate: float = 0.05
    name_perturbation: float = 0.1
    desc_truncation: float = 0.2
    markup_omission: float = 0.5
    host_pool_size: int = 40
    none_fraction: float = 0.5
    doi_rate: float = 0.7

    def rates(self) -> dict[str, float]:
        return {t: getattr(self, f"{t}_rate") for t in PLANT_TYPES}

    def validate(self) -> None:
        probs = dict(self.rates(), name_perturbation=self.name_perturbation,
                     desc_truncation=self.desc_truncation,
                     markup_omission=self.markup_omission, doi_rate=self.doi_rate)
        for key, v in probs.items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{key} must lie in [0, 1], got {v}")
        if not 0.0 <= self.none_fraction < 1.0:
            raise ValueError("none_fraction must lie in [0, 1)")
        if sum(self.rates().values()) > 1.0 + 1e-12:
            raise ValueError("plant rates sum above 1: families would carry colliding plants")
        if self.base_count < 2:
            raise ValueError("base_count must be at least 2")
        if self.base_count > len(AGENCIES) * len(MEASURES) * len(REGIONS):
            raise ValueError("base_count exceeds the number of distinct base names")
        if self.host_pool_size < 2:
            raise ValueError("host_pool_size must be at least 2")

    @classmethod
    def zero_noise(cls, seed: int, **kw) -> "SyntheticConfig":
        kw.setdefault("name_perturbation", 0.0)
        kw.setdefault("desc_truncation", 0.0)
        kw.setdefault("markup_omission", 0.0)
        return cls(seed=seed, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticConfig":
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class _Family:
    agency: str
    measure: str
    region: str
    members: list[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"{self.agency} {self.measure} {self.region}"


class _Generator:
    def __init__(self, config: SyntheticConfig):
        config.validate()
        self.cfg = config
        self.rng = random.Random(config.seed)
        self.hosts = list(KNOWN_HOSTS[:config.host_pool_size])
        self.hosts += [f"portal{i:03d}.opendata.example.org"
                       for i in range(len(self.hosts), config.host_pool_size)]
        self.records: list[DatasetRecord] = []
        self.serial = 0

    # -- record helpers ---------------------------------------------------
    def _host(self, exclude: Optional[str] = None) -> str:
        while True:
            h = self.rng.choice(self.hosts)
            if h != exclude:
                return h

    def _record(self, name: str, description: str, host: str, **extra) -> DatasetRecord:
        self.serial += 1
        url = canonicalize_url(f"https://{host}/dataset/{self.serial:06d}")
        doi = None
        if self.rng.random() < self.cfg.doi_rate:
            doi = f"doi:10.{5000 + self.hosts.index(host)}/ds.{self.serial:06d}"
        year = self.rng.randint(2005, 2023)
        rec = DatasetRecord(
            id=url, name=name, description=description, page_url=url, host=host_of(url),
            doi=doi, date_published=f"{year}-{self.rng.randint(1, 12):02d}-01", **extra)
        self.records.append(rec)
        return rec

    def _description(self, fam: _Family, detail: str = "") -> str:
        y1 = self.rng.randint(1950, 2005)
        y2 = self.rng.randint(y1 + 5, 2023)
        stations = self.rng.randint(12, 9000)
        extra = self.rng.sample(FILLER_SENTENCES, 2)
        parts = [f"{fam.measure} observations compiled by {fam.agency} for {fam.region} "
                 f"from {y1} to {y2}, drawing on {stations} reporting units."]
        if detail:
            parts.append(detail)
        parts.extend(extra)
        return " ".join(parts)

    def _truncate(self, text: str) -> str:
        if self.rng.random() >= self.cfg.desc_truncation:
            return text
        cut = int(len(text) * self.rng.uniform(0.25, 0.9))
        cut = text.rfind(" ", 0, cut)
        return text[:cut] if cut > 0 else text

    def _perturb(self, name: str) -> str:
        if self.rng.random() >= self.cfg.name_perturbation:
            return name
        words = name.split()
        op = self.rng.randrange(4)
        if op == 0:
            candidates = [i for i, w in enumerate(words) if len(w) >= 5]
            if candidates:
                i = self.rng.choice(candidates)
                w = words[i]
                j = self.rng.randrange(1, len(w) - 2)
                words[i] = w[:j] + w[j + 1] + w[j] + w[j + 2:]
                return " ".join(words)
            op = 2
        if op == 1:
            idx = [i for i, w in enumerate(words) if w.lower() in ABBREVIATIONS]
            if idx:
                i = self.rng.choice(idx)
                words[i] = ABBREVIATIONS[words[i].lower()].capitalize()
                return " ".join(words)
            op = 2
        if op == 2:
            filler = self.rng.choice(("Data", "Dataset", "Records", "Observations"))
            return " ".join(words + [filler])
        return " ".join(["Historical"] + words)

    def _ref(self, rec: DatasetRecord) -> str:
        return rec.doi or rec.page_url

    # -- plants ---------------------------------------------------------------
    def plant(self, kind: str, fam: _Family, gold: list[LabeledPair]) -> None:
        cfg, rng = self.cfg, self.rng
        keep_markup = rng.random() >= cfg.markup_omission
        if kind == "replica":
            desc = self._description(fam)
            base = self._record(fam.name, desc, self._host())
            extra = {"same_as": (self._ref(base),)} if keep_markup else {}
            plant = self._record(self._perturb(fam.name), self._truncate(desc),
                                 self._host(exclude=base.host), **extra)
            label = Label(Relation.REPLICA)
        elif kind == "version":
            style = rng.randrange(3)
            n = rng.randint(1, 8)
            if style == 0:
                names = (f"{fam.name} V{n}", f"{{}} V{n + 1}")
            elif style == 1:
                names = (fam.name, "{} Version 2")
            else:
                names = (f"{fam.name} Version {n}.0", f"{{}} Version {n}.1")
            host = self._host()
            base = self._record(names[0], self._description(fam), host,
                                version_label=None)
            phost = host if rng.random() < 0.9 else self._host(exclude=host)
            plant = self._record(
                names[1].format(self._perturb(fam.name)),
                self._description(fam, "This release adds corrections and new observations."),
                phost)
            label = Label(Relation.VERSION)
        elif kind == "subset":
            style = rng.random()
            if style < 0.6:
                suffix = str(rng.randint(1990, 2023))
            elif style < 0.8:
                suffix = f"{rng.choice(MONTH_NAMES)} {rng.randint(1990, 2023)}"
            else:
                suffix = rng.choice(SUBAREAS)
            host = self._host()
            base = self._record(fam.name, self._description(fam), host)
            phost = host if rng.random() < 0.6 else self._host(exclude=host)
            plant = self._record(f"{self._perturb(fam.name)} - {suffix}",
                                 self._description(fam, f"This extract covers {suffix}."),
                                 phost)
            label = Label(Relation.SUBSET, 1)
        elif kind == "variant":
            dim = rng.randrange(3)
            if dim == 0:
                s1, s2 = rng.sample(GRANULARITIES, 2)
            elif dim == 1:
                y = rng.randint(1990, 2022)
                s1, s2 = str(y), str(y + rng.randint(1, 3))
            else:
                s1, s2 = rng.sample(SUBAREAS, 2)
            host = self._host()
            base = self._record(f"{fam.name} - {s1}",
                                self._description(fam, f"Coverage: {s1}."), host)
            phost = host if rng.random() < 0.8 else self._host(exclude=host)
            plant = self._record(f"{self._perturb(fam.name)} - {s2}",
                                 self._description(fam, f"Coverage: {s2}."), phost)
            label = Label(Relation.VARIANT)
        elif kind == "derived":
            host = self._host()
            base = self._record(fam.name, self._description(fam), host)
            pattern = rng.choice(DEFAULT_DERIVATION_PATTERNS)
            extra = {"is_based_on": (self._ref(base),)} if keep_markup else {}
            phost = host if rng.random() < 0.8 else self._host(exclude=host)
            plant = self._record(
                f"{pattern.capitalize()} {self._perturb(fam.name)}",
                f"{pattern.capitalize()} the {fam.measure.lower()} records published by "
                f"{fam.agency}, produced with a documented processing workflow. "
                + rng.choice(FILLER_SENTENCES),
                phost, **extra)
            label = Label(Relation.DERIVED, 1)
        else:
            raise ValueError(f"unknown plant type {kind!r}")
        fam.members += [base.id, plant.id]
        gold.append(LabeledPair(plant.id, base.id, label).canonical())

    def run(self) -> tuple[Corpus, list[LabeledPair]]:
        cfg, rng = self.cfg, self.rng
        combos = [(a, m, r) for a in AGENCIES for m in MEASURES for r in REGIONS]
        families = [_Family(*c) for c in rng.sample(combos, cfg.base_count)]
        rates = cfg.rates()
        gold: list[LabeledPair] = []
        for fam in families:
            u, acc, kind = rng.random(), 0.0, None
            for t in PLANT_TYPES:
                acc += rates[t]
                if u < acc:
                    kind = t
                    break
            if kind is None:
                rec = self._record(fam.name, self._description(fam), self._host())
                fam.members.append(rec.id)
            else:
                self.plant(kind, fam, gold)

        n_planted = len(gold)
        if n_planted:
            n_none = round(n_planted * cfg.none_fraction / (1.0 - cfg.none_fraction))
        else:
            n_none = cfg.base_count // 2
        gold += self._none_pairs(families, n_none)
        gold.sort(key=lambda p: (p.a_id, p.b_id))
        manifest = {"synthetic": cfg.to_dict(), "accepted": len(self.records),
                    "rejected": 0, "duplicates": 0}
        return build_corpus(self.records, manifest), gold

    def _none_pairs(self, families: list[_Family], n: int) -> list[LabeledPair]:
        rng = self.rng
        owner = {rid: i for i, fam in enumerate(families) for rid in fam.members}
        by_key: dict[tuple[str, str], list[int]] = {}
        for i, fam in enumerate(families):
            for key in (("agency", fam.agency), ("measure", fam.measure),
                        ("region", fam.region)):
                by_key.setdefault(key, []).append(i)
        ids = sorted(owner)
        seen: set[tuple[str, str]] = set()
        out = []
        attempts = 0
        while len(out) < n and attempts < 50 * max(n, 1):
            attempts += 1
            a = rng.choice(ids)
            fa = families[owner[a]]
            if rng.random() < 0.5:
                field_name = rng.choice(("agency", "measure", "region"))
                pool = by_key[(field_name, getattr(fa, field_name))]
                fb = families[rng.choice(pool)]
                if not fb.members:
                    continue
                b = rng.choice(fb.members)
            else:
                b = rng.choice(ids)
            if owner[a] == owner[b]:
                continue
            key = (a, b) if a < b else (b, a)
            if key in seen:
                continue
            seen.add(key)
            out.append(LabeledPair(key[0], key[1], Label(Relation.NONE)))
        return out


def generate_synthetic(config: SyntheticConfig) -> tuple[Corpus, list[LabeledPair]]:
    """Build a corpus and its gold pairs; identical configs give identical output."""
    return _Generator(config).run()


def corpus_to_ndjson(corpus: Corpus) -> str:
    return "".join(json.dumps(record_to_jsonld(r), sort_keys=True, ensure_ascii=False) + "\n"
                   for r in corpus.records.values())
