import pytest

from cfground.corpus import apply_parses
from cfground.generator import Strategy
from cfground.geometry import anisotropy, bin_edges
from cfground.provider import SyntheticProvider
from cfground.synthdata import build_fixture_corpus, default_synonyms
from cfground.textnorm import normalize
from cfground.vocab import build_context_vocab, build_object_vocab

FIXTURE_SEED = 2024
PROVIDER_SEED = 7
PROVIDER_DIM = 32
# Mean direction mixing that mimics a contrastive encoder's anisotropy, so
# quantile edges over [0, 1] are well-posed for the synthetic backend.
PROVIDER_CONCENTRATION = 0.4


@pytest.fixture(scope="session")
def fixture_corpus():
    return build_fixture_corpus(50, seed=FIXTURE_SEED)


@pytest.fixture(scope="session")
def splits_and_dropped(fixture_corpus):
    return apply_parses(fixture_corpus.records, fixture_corpus.parses)


@pytest.fixture(scope="session")
def splits(splits_and_dropped):
    return splits_and_dropped[0]


@pytest.fixture(scope="session")
def anis_provider():
    return SyntheticProvider(
        seed=PROVIDER_SEED, dim=PROVIDER_DIM, concentration=PROVIDER_CONCENTRATION
    )


@pytest.fixture(scope="session")
def edges5(splits, anis_provider):
    texts = [normalize(s.record.text) for s in splits]
    embeddings = anis_provider.embed_batch(texts)
    _, dist = anisotropy(embeddings, n_pairs=4000, seed=11)
    return bin_edges(dist, k=5)


@pytest.fixture(scope="session")
def object_vocab():
    from cfground.synthdata import CATEGORIES

    return build_object_vocab(CATEGORIES, default_synonyms())


@pytest.fixture(scope="session")
def context_vocab(splits):
    return build_context_vocab(splits)


ALL_STRATEGIES = [Strategy.OBJECT_WORD, Strategy.OBJECT_SENTENCE, Strategy.CONTEXT]
