"""Shuttle-route planning engine."""

import json

from ._core import (
    PlanError,
    Service,
    bearing_deg,
    cluster_bearings,
    generate_dataset,
    greedy_regions,
    haversine_m,
    load_spots,
    silhouette,
    stop_metrics,
)

__all__ = [
    "PlanError",
    "Service",
    "Session",
    "bearing_deg",
    "cluster_bearings",
    "generate_dataset",
    "greedy_regions",
    "haversine_m",
    "load_spots",
    "silhouette",
    "stop_metrics",
]


class Session:
    """JSON convenience wrapper around one planning session of a Service."""

    def __init__(self, service, dataset, **options):
        self.service = service
        status, body = service.handle("POST", "/sessions", json.dumps({"dataset": dataset, **options}))
        payload = json.loads(body)
        if status != 201:
            raise PlanError(f"{payload.get('error')}: {payload.get('message')}")
        self.id = payload["session_id"]
        self.created = payload

    def call(self, method, path="", body=None, **query):
        status, text = self.service.handle(
            method,
            f"/sessions/{self.id}{path}",
            "" if body is None else json.dumps(body),
            {k: str(v) for k, v in query.items()},
        )
        return status, json.loads(text)
