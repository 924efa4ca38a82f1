import pytest
from hypothesis import HealthCheck, settings

from somlogic import (
    TrainConfig,
    build_model,
    build_preferential,
    feature_range,
    init_map,
    three_cluster_dataset,
    train,
)

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


REF_MAP = dict(rows=6, cols=6, seed=0)
REF_CFG = TrainConfig(epochs=50, lr_start=0.7, lr_end=0.05, radius_start=3.0, radius_end=0.5, seed=0)


@pytest.fixture(scope="session")
def clusters():
    return three_cluster_dataset()


@pytest.fixture(scope="session")
def trained_map(clusters):
    som0 = init_map(REF_MAP["rows"], REF_MAP["cols"], clusters[0].dim, REF_MAP["seed"], feature_range(clusters))
    trained, _ = train(som0, clusters, REF_CFG)
    return trained


@pytest.fixture(scope="session")
def cluster_model(trained_map, clusters):
    return build_model(trained_map, clusters)


@pytest.fixture(scope="session")
def cluster_pref(cluster_model):
    return build_preferential(cluster_model)
