import json

import pytest

from datarel.ingest import ingest_corpus
from datarel.model import DatasetRecord, host_of, normalize_record


def make_record(name, description="", url="https://a.org/x", rid=None, **kw):
    """A NormalizedRecord built the same way ingestion builds one."""
    rec = DatasetRecord(id=rid or url, name=name, description=description,
                        page_url=url, host=host_of(url), **kw)
    return normalize_record(rec)


def corpus_from(objs):
    return ingest_corpus([json.dumps(o) for o in objs])


@pytest.fixture
def rec():
    return make_record


@pytest.fixture(scope="session")
def small_world():
    """A small synthetic corpus, its gold pairs and a model trained on them."""
    from datarel.classifier import split_labeled, train_pair_classifier
    from datarel.synthetic import SyntheticConfig, generate_synthetic

    corpus, gold = generate_synthetic(SyntheticConfig(seed=11, base_count=400))
    train, valid, test = split_labeled(gold, seed=11)
    model = train_pair_classifier(train, valid, corpus.normalized, seed=11)
    return corpus, gold, model, (train, valid, test)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
