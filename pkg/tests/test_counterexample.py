import json
import math

import numpy as np
import pytest

from src.errors import ValidationError
from src.models import CounterexampleRecord
from src.msym import cgh_counterexample, expected_edge_forms, expected_w_map, wedge


@pytest.fixture(scope="module")
def record():
    return cgh_counterexample()


def test_closed_forms_are_consistent():
    np.testing.assert_array_equal(wedge(1, 2), -wedge(2, 1))
    assert wedge(2, 3)[1, 2] == 1.0
    np.testing.assert_allclose(sum(expected_edge_forms()), np.zeros((3, 3)), atol=1e-16)
    w = expected_w_map()
    np.testing.assert_allclose(w, w.T)
    np.testing.assert_allclose(w.sum(axis=1), 0.0, atol=1e-15)


def test_every_check_matches(record):
    assert record.passed
    assert record.failed_checks == []
    assert [check.name for check in record.checks] == [
        "w_map",
        "edge_forms",
        "edge_sum",
        "boundary_form",
        "variation_pair",
    ]
    for check in record.checks:
        assert check.error <= check.tolerance


def test_strong_residual_and_pair_value(record):
    assert record.labels == ["u1", "u2", "u3", "u4"]
    assert record.strong_residual == pytest.approx(0.5, abs=1e-12)
    assert record.strong_absolute == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-12)
    (pair,) = [check for check in record.checks if check.name == "variation_pair"]
    assert pair.computed[0][0] == pytest.approx(math.sqrt(3.0) / 6.0, abs=1e-12)


def test_record_serializes(record):
    document = json.loads(record.to_json())
    assert document["passed"] is True
    assert len(document["checks"]) == 5
    assert CounterexampleRecord.model_validate(document).passed


def test_only_degree_one():
    with pytest.raises(ValidationError):
        cgh_counterexample(degree=2)
