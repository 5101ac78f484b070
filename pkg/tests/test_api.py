import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


def test_rate(client):
    response = client.post("/rate", json={"h": [[1, 0], [0, 0]], "snr_db": 0})
    body = response.json()
    assert body["success"] is True
    assert body["a"] == [[1, 0], [0, 0]]
    assert body["rate"] == pytest.approx(1.0)


def test_snf(client):
    response = client.post("/snf", json={"J": [[[3, 0], [-1, 0]], [[0, 0], [1, 0]]]})
    body = response.json()
    assert body["success"] is True
    assert body["D"] == [[[1, 0], [0, 0]], [[0, 0], [3, 0]]]
    assert body["invariant_factors"] == ["3"]


def test_analyze_partition(client):
    response = client.post(
        "/analyze-partition",
        json={
            "G": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
            "J": [[[3, 0], [0, 0]], [[0, 0], [3, 0]]],
        },
    )
    body = response.json()
    assert body["success"] is True
    assert body["index"] == 81
    assert (body["q"], body["k"]) == (9, 2)
    assert body["vector_space"] is True
    assert body["factorization"] == ["(3)^1"]


def test_errors_are_enveloped(client):
    body = client.post("/snf", json={"J": [[[1, 0], [2, 0]], [[2, 0], [4, 0]]]}).json()
    assert body["success"] is False
    assert "singular" in body["error"]

    body = client.post("/rate", json={"h": [[1, 0]] * 5, "snr_db": 10}).json()
    assert body["success"] is False
    assert body["error"]


def test_malformed_request_is_rejected(client):
    response = client.post("/snf", json={"J": "not a matrix"})
    assert response.status_code == 422
