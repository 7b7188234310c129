import pytest

from folvec import dataset_gen as dg


@pytest.fixture(scope="session")
def small_corpus():
    return dg.gen_random_corpus(300, max_depth=3, seed=5)


@pytest.fixture(scope="session")
def toy_corpus():
    return dg.gen_random_corpus(300, max_depth=3, seed=5,
                                cfg=dg.toy_sampler_config())
