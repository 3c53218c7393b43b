import pytest

from countycluster.pipeline import RunConfig, run_analysis, run_ingest
from countycluster.synthdata import county_corpus


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Generated 18-table corpus directory plus its generative truth."""
    directory = tmp_path_factory.mktemp("corpus")
    info = county_corpus(directory, seed=2024)
    return directory, info


@pytest.fixture(scope="session")
def fixture_bundle(corpus):
    """Full pipeline run over the corpus (shared; treat as immutable)."""
    directory, info = corpus
    config = RunConfig.from_file(directory / "config.json")
    result = run_ingest(config)
    bundle = run_analysis(result.master, config, result.report)
    return bundle, info


@pytest.fixture(scope="session")
def bundle_dir(fixture_bundle, tmp_path_factory):
    bundle, _ = fixture_bundle
    directory = tmp_path_factory.mktemp("bundle")
    bundle.save(directory)
    return directory
