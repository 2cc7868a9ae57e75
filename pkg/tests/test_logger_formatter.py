import logging

from src.logger_formatter import LEVEL_COLORS, RESET, CustomFormatter


def record(level: int, message: str = 'deployment stalled') -> logging.LogRecord:
    return logging.LogRecord('src.service.search_service', level, __file__, 1, message, None, None)


class TestCustomFormatter:

    def test_colors_by_level(self):
        text = CustomFormatter().format(record(logging.WARNING))
        assert text.startswith(LEVEL_COLORS[logging.WARNING])
        assert text.endswith('src.service.search_service: deployment stalled' + RESET)

    def test_names_the_process(self):
        assert '[MainProcess]' in CustomFormatter().format(record(logging.INFO))

    def test_custom_level_is_plain(self):
        text = CustomFormatter().format(record(25))
        assert RESET not in text
        assert text.endswith('deployment stalled')
