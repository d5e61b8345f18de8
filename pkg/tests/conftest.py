import sys
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
SCENARIOS = FIXTURES / "scenarios"
PROMPTS = FIXTURES / "prompts"
GOLDEN = FIXTURES / "golden"

sys.path.insert(0, str(REPO_ROOT / "tests"))


@pytest.fixture
def rng():
    return np.random.RandomState(1234)


def random_mask(rng, h=16, w=16, p=0.4):
    return rng.random_sample((h, w)) < p


def random_labelmap(rng, h=16, w=16, max_label=4):
    return rng.randint(0, max_label + 1, size=(h, w)).astype(np.uint16)


def scenario_paths():
    return sorted(SCENARIOS.glob("*.json"))


@pytest.fixture(scope="session")
def all_scenarios():
    from samtrack.harness import load_scenario

    return [load_scenario(p) for p in scenario_paths()]


class LiveServer:
    """uvicorn on a random localhost port, in a daemon thread."""

    def __init__(self, app):
        import socket
        import threading
        import time

        import uvicorn

        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        self.port = sock.getsockname()[1]
        sock.close()
        self.url = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.thread.start()
        for _ in range(200):
            if self.server.started:
                return
            time.sleep(0.05)
        raise RuntimeError("uvicorn failed to start")

    def stop(self):
        self.server.should_exit = True
        self.thread.join(timeout=10)
