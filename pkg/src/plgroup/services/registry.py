"""
Named service registry.

The module-level ``service_registry`` holds the built-in services; the CLI
shuts them all down on exit.
"""
from typing import Dict, Type, TypeVar, cast

from src.plgroup.services.base import BaseService
from src.plgroup.services.suite_service import SuiteService
from src.plgroup.utils.logging import get_logger

T = TypeVar("T", bound=BaseService)


class ServiceRegistry:
    """Registry mapping names to service instances."""

    def __init__(self) -> None:
        self.services: Dict[str, BaseService] = {}
        self.logger = get_logger(self.__class__.__name__)

    def register(self, service_name: str, service: BaseService) -> None:
        """
        Add a service under a new name.

        Raises:
            ValueError: If the name is taken
        """
        if service_name in self.services:
            raise ValueError(f"Service '{service_name}' is already registered")
        self.services[service_name] = service
        self.logger.debug("Registered service: %s", service_name)

    def get(self, service_name: str, initialize: bool = True) -> BaseService:
        """
        Look up a service, initializing it on first use unless told otherwise.

        Raises:
            KeyError: If the name is unknown
        """
        if service_name not in self.services:
            raise KeyError(f"Service '{service_name}' is not registered")
        service = self.services[service_name]
        if initialize and not service.is_initialized():
            service.initialize()
        return service

    def get_typed(self, service_name: str, service_type: Type[T], initialize: bool = True) -> T:
        """
        Like :meth:`get`, checking the service class.

        Raises:
            KeyError: If the name is unknown
            TypeError: If the service has another type
        """
        service = self.get(service_name, initialize)
        if not isinstance(service, service_type):
            raise TypeError(f"Service '{service_name}' is not of type {service_type.__name__}")
        return cast(T, service)

    def shutdown_all(self) -> None:
        self.logger.info("Shutting down all services")
        for service_name, service in self.services.items():
            if service.is_initialized():
                self.logger.debug("Shutting down service: %s", service_name)
                service.shutdown()

    def __contains__(self, service_name: str) -> bool:
        return service_name in self.services


service_registry = ServiceRegistry()
service_registry.register("suite", SuiteService())
