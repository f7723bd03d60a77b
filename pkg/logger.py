"""
Structured logging for the G-Recon laboratory.
Console output goes to standard error (standard output is reserved for JSON
reports); rotating files carry the full structured record.
"""
import json
import logging
import logging.handlers
import os
import sys
import time
import traceback
import uuid
from contextlib import contextmanager
from datetime import datetime
from enum import Enum, auto
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Optional, TypeVar, Union

try:
    from tqdm import tqdm
except ImportError:  # pragma: no cover - progress bars are optional
    tqdm = None

LOG_DIR_ENV = "GRECON_LOG_DIR"

T = TypeVar("T")


class LogLevel(Enum):
    """Log levels, including a TRACE level below DEBUG for inner-loop detail."""
    TRACE = 5
    DEBUG = 10
    INFO = 20
    WARNING = 30
    ERROR = 40
    CRITICAL = 50


class LogCategory(Enum):
    """Categories attached to every structured record."""
    SYSTEM = auto()
    GROUP = auto()
    CANONICAL = auto()
    DECK = auto()
    LEMMA = auto()
    STRUCTURE = auto()
    SEARCH = auto()
    CLI = auto()
    DATA = auto()


class StructuredFormatter(logging.Formatter):
    """Formatter that appends a JSON payload of structured fields."""
    def __init__(self, include_json: bool = True):
        super().__init__()
        self.include_json = include_json

    def format(self, record: logging.LogRecord) -> str:
        timestamp = datetime.fromtimestamp(record.created).isoformat()
        basic_line = f"[{timestamp}] {record.levelname:8} {record.name}: {record.getMessage()}"
        if not self.include_json:
            return basic_line
        structured_data: Dict[str, Any] = {}
        for key, value in record.__dict__.items():
            if key.startswith("field_") or key in ("category", "session_id"):
                structured_data[key] = value
        if record.exc_info:
            structured_data["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": traceback.format_exception(*record.exc_info),
            }
        structured_data["location"] = {
            "filename": record.filename,
            "line": record.lineno,
            "function": record.funcName,
        }
        json_data = json.dumps(structured_data, default=str, ensure_ascii=False)
        return f"{basic_line} | {json_data}"


def resolve_log_dir(log_dir: Optional[Union[str, Path]] = None) -> Path:
    """Explicit directory, else ``$GRECON_LOG_DIR``, else ``~/.grecon/logs``."""
    if log_dir is not None:
        return Path(log_dir)
    env_dir = os.environ.get(LOG_DIR_ENV)
    if env_dir:
        return Path(env_dir)
    return Path.home() / ".grecon" / "logs"


class LabLogger:
    """Structured logger with console, rotating file, error and experiment channels."""
    def __init__(
        self,
        name: str = "grecon",
        log_dir: Optional[Union[str, Path]] = None,
        console_level: int = logging.INFO,
    ):
        self.name = name
        self.session_id = str(uuid.uuid4())[:8]
        self.log_dir: Optional[Path] = resolve_log_dir(log_dir)
        self.experiment_handler: Optional[logging.Handler] = None
        self.progress_enabled = False
        self._setup_loggers(console_level)
        self.debug(
            "Logging initialised",
            category=LogCategory.SYSTEM,
            session_id=self.session_id,
            log_dir=str(self.log_dir) if self.log_dir else None,
        )

    def _setup_loggers(self, console_level: int) -> None:
        self.logger = logging.getLogger(self.name)
        self.logger.setLevel(LogLevel.TRACE.value)
        self.logger.propagate = False
        for handler in list(self.logger.handlers):
            handler.close()
        self.logger.handlers.clear()

        self.console_handler = logging.StreamHandler(sys.stderr)
        self.console_handler.setLevel(console_level)
        self.console_handler.setFormatter(StructuredFormatter(include_json=False))
        self.logger.addHandler(self.console_handler)

        try:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                self.log_dir / f"{self.name}.log", maxBytes=10 * 1024 * 1024, backupCount=5
            )
            error_handler = logging.handlers.RotatingFileHandler(
                self.log_dir / f"{self.name}_errors.log", maxBytes=5 * 1024 * 1024, backupCount=5
            )
            experiment_handler = logging.handlers.RotatingFileHandler(
                self.log_dir / f"{self.name}_experiments.log",
                maxBytes=5 * 1024 * 1024,
                backupCount=3,
            )
        except OSError as exc:
            failed_dir = self.log_dir
            self.log_dir = None
            self.warning(
                "Log directory unavailable; console logging only",
                category=LogCategory.SYSTEM,
                log_dir=str(failed_dir),
                reason=str(exc),
            )
            return

        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(StructuredFormatter(include_json=True))
        self.logger.addHandler(file_handler)

        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(StructuredFormatter(include_json=True))
        self.logger.addHandler(error_handler)

        # Not attached to the logger: only experiment_event writes here.
        experiment_handler.setLevel(logging.INFO)
        experiment_handler.setFormatter(StructuredFormatter(include_json=True))
        self.experiment_handler = experiment_handler

    def _extra(self, category: Optional[Union[LogCategory, str]], fields: Dict[str, Any]):
        if category is None:
            category_name = "GENERAL"
        elif isinstance(category, LogCategory):
            category_name = category.name
        else:
            category_name = str(category)
        extra = {"session_id": self.session_id, "category": category_name}
        for key, value in fields.items():
            if not key.startswith("_"):
                extra[f"field_{key}"] = value
        return extra

    def _log(
        self,
        level: int,
        message: str,
        category: Optional[Union[LogCategory, str]] = None,
        exception: Optional[BaseException] = None,
        **kwargs,
    ) -> None:
        extra = self._extra(category, kwargs)
        if exception is not None:
            exc_info = (type(exception), exception, exception.__traceback__)
            self.logger.log(level, message, exc_info=exc_info, extra=extra)
        else:
            self.logger.log(level, message, extra=extra)

    def trace(self, message: str, category: Optional[LogCategory] = None, **kwargs):
        self._log(LogLevel.TRACE.value, message, category, **kwargs)

    def debug(self, message: str, category: Optional[LogCategory] = None, **kwargs):
        self._log(LogLevel.DEBUG.value, message, category, **kwargs)

    def info(self, message: str, category: Optional[LogCategory] = None, **kwargs):
        self._log(LogLevel.INFO.value, message, category, **kwargs)

    def warning(self, message: str, category: Optional[LogCategory] = None, **kwargs):
        self._log(LogLevel.WARNING.value, message, category, **kwargs)

    def error(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        category: Optional[LogCategory] = None,
        **kwargs,
    ):
        self._log(LogLevel.ERROR.value, message, category, exception, **kwargs)

    def critical(
        self,
        message: str,
        exception: Optional[BaseException] = None,
        category: Optional[LogCategory] = None,
        **kwargs,
    ):
        self._log(LogLevel.CRITICAL.value, message, category, exception, **kwargs)

    def experiment_event(self, message: str, **kwargs) -> None:
        """Record an experiment milestone in the main log and the experiment log."""
        self._log(LogLevel.DEBUG.value, f"EXPERIMENT: {message}", LogCategory.SEARCH, **kwargs)
        if self.experiment_handler is None:
            return
        extra = self._extra(LogCategory.SEARCH, kwargs)
        record = self.logger.makeRecord(
            self.name, LogLevel.INFO.value, __file__, 0, f"EXPERIMENT: {message}", (), None,
            extra=extra,
        )
        self.experiment_handler.handle(record)

    @contextmanager
    def timer(self, operation: str, log_result: bool = True) -> Iterator[str]:
        """Time a block; yields an operation id and logs the duration on exit."""
        start_time = time.perf_counter()
        operation_id = str(uuid.uuid4())[:8]
        self.debug(
            f"Starting operation: {operation}",
            category=LogCategory.SYSTEM,
            operation_id=operation_id,
        )
        try:
            yield operation_id
        finally:
            duration = time.perf_counter() - start_time
            self.last_duration = duration
            if log_result:
                self.info(
                    f"Completed operation: {operation} in {duration:.3f}s",
                    category=LogCategory.SYSTEM,
                    operation_id=operation_id,
                    duration=duration,
                )

    def set_console_level(self, level: Union[str, int, LogLevel]) -> None:
        """Change only the console threshold (``--quiet`` raises it to WARNING)."""
        if isinstance(level, LogLevel):
            level = level.value
        elif isinstance(level, str):
            level = getattr(logging, level.upper())
        self.console_handler.setLevel(level)

    def get_session_id(self) -> str:
        return self.session_id

    def close(self) -> None:
        for handler in list(self.logger.handlers):
            handler.flush()
            handler.close()
        self.logger.handlers.clear()
        if self.experiment_handler is not None:
            self.experiment_handler.close()
            self.experiment_handler = None


# Global logger instance
_global_logger: Optional[LabLogger] = None


def get_logger() -> LabLogger:
    """Get the global logger instance, creating a default one on first use."""
    global _global_logger
    if _global_logger is None:
        _global_logger = LabLogger()
    return _global_logger


def setup_logger(
    name: str = "grecon",
    log_dir: Optional[Union[str, Path]] = None,
    console_level: int = logging.INFO,
) -> LabLogger:
    """Set up and return the global logger."""
    global _global_logger
    if _global_logger is not None:
        _global_logger.close()
    _global_logger = LabLogger(name, log_dir, console_level)
    return _global_logger


def debug(message: str, **kwargs):
    get_logger().debug(message, **kwargs)


def info(message: str, **kwargs):
    get_logger().info(message, **kwargs)


def warning(message: str, **kwargs):
    get_logger().warning(message, **kwargs)


def error(message: str, exception: Optional[BaseException] = None, **kwargs):
    get_logger().error(message, exception=exception, **kwargs)


def experiment_event(message: str, **kwargs):
    get_logger().experiment_event(message, **kwargs)


def timer(operation: str, log_result: bool = True):
    return get_logger().timer(operation, log_result)


class LoggableMixin:
    """Mixin adding class-prefixed logging helpers backed by the global logger."""
    def __init__(self):
        self._logger = get_logger()
        self._module_name = self.__class__.__name__

    def log_trace(self, message: str, *args, **kwargs):
        self._logger.trace(f"[{self._module_name}] {message}", *args, **kwargs)

    def log_debug(self, message: str, *args, **kwargs):
        self._logger.debug(f"[{self._module_name}] {message}", *args, **kwargs)

    def log_info(self, message: str, *args, **kwargs):
        self._logger.info(f"[{self._module_name}] {message}", *args, **kwargs)

    def log_warning(self, message: str, *args, **kwargs):
        self._logger.warning(f"[{self._module_name}] {message}", *args, **kwargs)

    def log_error(self, message: str, *args, exception: Optional[BaseException] = None, **kwargs):
        self._logger.error(f"[{self._module_name}] {message}", *args, exception=exception, **kwargs)

    def log_experiment_event(self, message: str, **kwargs):
        self._logger.experiment_event(f"[{self._module_name}] {message}", **kwargs)


def enable_progress(enabled: bool = True) -> None:
    """Turn tqdm progress bars on standard error on or off (off by default)."""
    get_logger().progress_enabled = enabled


def progress(iterable: Iterable[T], total: Optional[int] = None, desc: Optional[str] = None):
    """Wrap ``iterable`` in a progress bar when progress output is enabled."""
    if tqdm is None or not get_logger().progress_enabled:
        return iterable
    return tqdm(iterable, total=total, desc=desc, file=sys.stderr, leave=False, unit="item")
