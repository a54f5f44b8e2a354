import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, when the acceptance module ran."""
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LEDGER.checks:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LEDGER.lines():
        terminalreporter.write_line(line)
