# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import logging
import os
import sys

from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor

"""
This file contains initialization code and global vars that are
used throughout the entire toolkit
"""

LOG_LEVEL = os.environ.get("CQNC_LOG_LEVEL", "WARNING").upper()
NO_COLOR = bool(os.environ.get("NO_COLOR"))
OTEL_SDK_DISABLED = os.environ.get("OTEL_SDK_DISABLED", "").lower() == "true"
COLLECTOR_ENDPOINT = os.environ.get("COLLECTOR_ENDPOINT")
COLLECTOR_GRPC_PORT = os.environ.get("COLLECTOR_GRPC_PORT", "4317")

TRACER = trace.get_tracer("cqnc_tracer")

_LEVEL_COLORS = {
    logging.DEBUG: "\033[36m",
    logging.INFO: "\033[32m",
    logging.WARNING: "\033[33m",
    logging.ERROR: "\033[31m",
    logging.CRITICAL: "\033[1;31m",
}
_RESET = "\033[0m"


def otel_enabled() -> bool:
    """Spans are only exported when a collector is configured and the sdk is not disabled"""
    return bool(COLLECTOR_ENDPOINT) and not OTEL_SDK_DISABLED


def init_otel() -> bool:
    """Initialize the open telemetry config; returns whether a provider was installed"""
    if not otel_enabled():
        return False

    resource = Resource(attributes={"service.name": "cqnc"})
    provider = TracerProvider(resource=resource)
    processor = BatchSpanProcessor(
        OTLPSpanExporter(endpoint=f"http://{COLLECTOR_ENDPOINT}:{COLLECTOR_GRPC_PORT}")
    )
    provider.add_span_processor(processor)

    # Sets the global default tracer provider
    trace.set_tracer_provider(provider)
    logging.getLogger(__name__).info(
        "Initialized open telemetry exporting to %s:%s",
        COLLECTOR_ENDPOINT,
        COLLECTOR_GRPC_PORT,
    )
    return True


class LevelColorFormatter(logging.Formatter):
    def __init__(self, use_color: bool):
        super().__init__("%(levelname)s %(name)s: %(message)s")
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        text = super().format(record)
        if not self.use_color:
            return text
        color = _LEVEL_COLORS.get(record.levelno)
        return f"{color}{text}{_RESET}" if color else text


def configure_logging(level: str | int | None = None, stream=None) -> logging.Handler:
    """
    Install a single stderr handler on the root logger.
    Colour is used only when the stream is a tty and NO_COLOR is unset
    """
    stream = stream or sys.stderr
    use_color = not NO_COLOR and hasattr(stream, "isatty") and stream.isatty()
    handler = logging.StreamHandler(stream)
    handler.setFormatter(LevelColorFormatter(use_color))

    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "_cqnc_handler", False):
            root.removeHandler(existing)
    setattr(handler, "_cqnc_handler", True)
    root.addHandler(handler)
    root.setLevel(level if level is not None else LOG_LEVEL)
    return handler
