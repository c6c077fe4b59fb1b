"""
Integration tests for the suite service and the service registry.
"""
import pytest

from src.plgroup.services.base import BaseService
from src.plgroup.services.registry import ServiceRegistry, service_registry
from src.plgroup.services.suite_service import SuiteService


class IdleService(BaseService):
    """Service with no resources, used to exercise the registry."""

    def initialize(self) -> None:
        self.initialized = True

    def shutdown(self) -> None:
        self.initialized = False


class TestSuiteService:
    """Tests for the SuiteService class."""

    def test_lifecycle(self):
        service = SuiteService({"threads": 3})
        assert not service.is_initialized()
        with service:
            assert service.is_initialized()
            assert service.threads == 3
            assert service.executor is not None
            service.initialize()
            assert service.threads == 3
        assert not service.is_initialized()
        assert service.executor is None

    def test_not_initialized(self):
        service = SuiteService()
        with pytest.raises(RuntimeError):
            service.run(2, 0, 0)
        with pytest.raises(RuntimeError):
            list(service.stream(2, 0, 0))

    def test_thread_count_does_not_change_the_report(self):
        reports = []
        for threads in (1, 3):
            with SuiteService({"threads": threads}) as service:
                report = service.run(2, 3, 2, max_word_length=2, heavy_divisor=10)
                reports.append(report.render())
        assert reports[0] == reports[1]

    def test_stream_matches_run(self):
        with SuiteService({"threads": 2}) as service:
            streamed = [r.render() for r in service.stream(2, 1, 0)]
            report = service.run(2, 1, 0)
        assert "".join(streamed) + report.summary() == report.render()


class TestServiceRegistry:
    """Tests for the ServiceRegistry class."""

    def test_register_and_get(self):
        registry = ServiceRegistry()
        service = IdleService()
        registry.register("idle", service)
        assert "idle" in registry
        assert registry.get("idle", initialize=False) is service
        assert not service.is_initialized()
        assert registry.get("idle") is service
        assert service.is_initialized()

    def test_duplicate_and_unknown(self):
        registry = ServiceRegistry()
        registry.register("idle", IdleService())
        with pytest.raises(ValueError):
            registry.register("idle", IdleService())
        with pytest.raises(KeyError):
            registry.get("absent")

    def test_get_typed(self):
        registry = ServiceRegistry()
        registry.register("idle", IdleService())
        with pytest.raises(TypeError):
            registry.get_typed("idle", SuiteService)
        assert isinstance(registry.get_typed("idle", IdleService), IdleService)

    def test_lifecycle_of_all(self):
        registry = ServiceRegistry()
        first, second = IdleService(), IdleService()
        registry.register("first", first)
        registry.register("second", second)
        registry.get("first")
        assert first.is_initialized() and not second.is_initialized()
        registry.shutdown_all()
        assert not first.is_initialized() and not second.is_initialized()

    def test_builtin_suite_service(self):
        assert "suite" in service_registry
        service = service_registry.get_typed("suite", SuiteService, initialize=False)
        assert isinstance(service, SuiteService)
