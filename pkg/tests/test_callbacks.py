import logging
from concurrent.futures import ThreadPoolExecutor

from src.callbacks import ProgressCallback, get_callback_handler


def test_events_are_recorded_without_timestamps():
    callback = ProgressCallback("run-a")
    callback.on_scan_start(3, ["uniform"])
    callback.on_violation(7, "upper", 0.5, 0.1)
    callback.on_scan_finish(1, 0.25)
    assert [e["event"] for e in callback.events] == ["scan_start", "violation", "scan_finish"]
    violation = callback.events_named("violation")[0]
    assert violation["seed"] == 7 and violation["bound"] == "upper"
    assert all(e["run_id"] == "run-a" for e in callback.events)
    assert not any("time" in key for e in callback.events for key in e)


def test_progress_every():
    callback = ProgressCallback("run-b", progress_every=3)
    for index in range(7):
        callback.on_record(index, 7)
    assert [e["done"] for e in callback.events_named("scan_progress")] == [3, 6, 7]


def test_failed_check_logs_error(caplog):
    callback = ProgressCallback("run-c")
    with caplog.at_level(logging.INFO, logger="src.callbacks"):
        callback.on_check("dual_path", False, 1.0, 1e-9)
        callback.on_check("purity", True, 0.0, 1e-12)
    levels = [r.levelno for r in caplog.records if "dual_path" in r.getMessage() or "purity" in r.getMessage()]
    assert levels == [logging.ERROR, logging.INFO]


def test_error_event_truncates_message():
    callback = ProgressCallback("run-d")
    callback.on_error("x" * 300)
    event = callback.events_named("error")[0]
    assert len(event["error"]) == 300
    assert len(event["message"]) < 120


def test_handler_singleton_per_run_id():
    first = get_callback_handler("scan-1")
    assert get_callback_handler("scan-1") is first
    assert get_callback_handler("scan-2") is not first


def test_chunk_progress_crosses_boundaries():
    callback = ProgressCallback("run-e", progress_every=5)
    for before, after in [(0, 4), (4, 8), (8, 9), (9, 13), (13, 14)]:
        callback.on_chunk(before, after, 14)
    assert [e["done"] for e in callback.events_named("scan_progress")] == [8, 13, 14]


def test_handler_singleton_is_shared_across_threads():
    with ThreadPoolExecutor(max_workers=8) as pool:
        handlers = list(pool.map(lambda _: get_callback_handler("threaded"), range(64)))
    assert all(h is handlers[0] for h in handlers)
