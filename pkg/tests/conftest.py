import pytest

_RESULTS = pytest.StashKey[dict]()


class Criterion:
    """Collects the individual checks of one acceptance criterion."""

    def __init__(self, store):
        self._store = store
        self.number = None
        self.title = ""
        self.checks = []

    def start(self, number, title):
        self.number, self.title = number, title

    def check(self, ok, detail):
        self.checks.append((bool(ok), detail))

    def conclude(self):
        failed = [d for ok, d in self.checks if not ok]
        status = "FAIL" if failed or not self.checks else "PASS"
        line = (f"criterion {self.number:2d} {status}: {self.title} "
                f"({len(self.checks) - len(failed)}/{len(self.checks)} checks)")
        print(line)
        for d in failed[:8]:
            print(f"    failed: {d}")
        self._store[self.number] = (line, failed[:8])
        assert not failed, f"{len(failed)} failing checks, first: {failed[:3]}"
        assert self.checks, "no checks recorded"


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def criterion(request):
    return Criterion(request.config.stash[_RESULTS])


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        line, failed = results[number]
        terminalreporter.write_line(line)
        for d in failed:
            terminalreporter.write_line(f"    failed: {d}")
