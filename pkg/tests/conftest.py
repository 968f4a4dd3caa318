import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    by_criterion: dict[str, bool] = {}
    for key in sorted(RESULTS):
        passed, detail = RESULTS[key]
        tr.write_line(f"{'PASS' if passed else 'FAIL'}  {key}: {detail}")
        crit = key.split()[0].split(".")[0]
        by_criterion[crit] = by_criterion.get(crit, True) and passed
    tr.write_line("")
    for crit, passed in by_criterion.items():
        tr.write_line(f"{crit}: {'PASS' if passed else 'FAIL'}")
