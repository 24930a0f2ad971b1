import logging
import os
from datetime import datetime
from pathlib import Path


def _debug_requested() -> bool:
    return os.getenv('DEBUG', '').lower() in ('true', '1', 'yes', 'on')


def setup_flowmut_logging():
    """Set up the shared FlowMut logger (file + console)"""
    logs_dir = Path(os.getenv('FLOWMUT_LOG_DIR', 'logs'))
    logs_dir.mkdir(parents=True, exist_ok=True)

    # One log file per process
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_filename = logs_dir / f"flowmut_{timestamp}.log"

    flowmut_logger = logging.getLogger('FlowMut')
    flowmut_logger.setLevel(logging.DEBUG)

    # Only add handlers if not already configured
    if not flowmut_logger.handlers:
        # File handler - logs everything
        file_handler = logging.FileHandler(log_filename, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        file_handler.setFormatter(file_formatter)

        # Console handler - warnings and errors unless DEBUG is set
        console_handler = logging.StreamHandler()
        if _debug_requested():
            console_handler.setLevel(logging.DEBUG)
        else:
            console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        console_handler.set_name('console')

        flowmut_logger.addHandler(file_handler)
        flowmut_logger.addHandler(console_handler)
        flowmut_logger.propagate = False

    flowmut_logger.info(f"FlowMut logging initialized - log file: {log_filename}")
    return flowmut_logger


def set_console_level(level: int) -> None:
    """Change the console verbosity (used by --verbose)"""
    for handler in logging.getLogger('FlowMut').handlers:
        if handler.get_name() == 'console':
            handler.setLevel(level)
