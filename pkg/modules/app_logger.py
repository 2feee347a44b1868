"""
Logging Module for FsmAnimator

FsmAnimator 用のログ設定を提供します。
コンソール（標準エラー出力）と、設定されている場合はローテーション付きのファイルに出力します。
"""

import logging
import logging.handlers
from pathlib import Path
from typing import Any, Dict

APP_LOGGER_NAME = 'FsmAnimator'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# modules.* のロガーも同じハンドラーに流す
_MODULE_LOGGER_NAME = 'modules'


def _console_level(config: Dict[str, Any], verbosity: int) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return getattr(logging, str(config.get('log_level', 'WARNING')).upper(), logging.WARNING)


def setup_logging(config: Dict[str, Any], verbosity: int = 0) -> logging.Logger:
    """
    ログ設定を行う

    Args:
        config: アプリケーション設定（log_level, log_file, max_log_size_mb, backup_log_count）
        verbosity: -v の個数（1 で INFO、2 以上で DEBUG）

    Returns:
        logging.Logger: アプリケーションのロガー
    """
    logger = logging.getLogger(APP_LOGGER_NAME)
    module_logger = logging.getLogger(_MODULE_LOGGER_NAME)
    level = _console_level(config, verbosity)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    # 既存のハンドラーをクリア
    for target in (logger, module_logger):
        for handler in target.handlers[:]:
            target.removeHandler(handler)
            handler.close()
        target.setLevel(level)
        target.propagate = False

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    handlers = [console_handler]

    log_file = config.get('log_file')
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        max_size_mb = config.get('max_log_size_mb', 10)
        backup_count = config.get('backup_log_count', 5)
        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=max_size_mb * 1024 * 1024,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    for handler in handlers:
        logger.addHandler(handler)
        module_logger.addHandler(handler)

    logger.debug(f"Logging configured (level={logging.getLevelName(level)}, file={log_file})")
    return logger
