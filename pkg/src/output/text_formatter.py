# src/output/text_formatter.py
from pathlib import Path

from config.settings import OUTPUT_DIR
from config.logging_config import logger


def format_key_values(values):
    """Flat `key=value` lines; floats use repr so runs compare byte for byte."""
    lines = []
    for key, value in values.items():
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def format_report(report):
    return format_key_values(report.to_dict())


def format_recommendations(recommendations, catalog):
    """`rank token probability` lines."""
    return "".join(f"{rank} {catalog.token_of(item)} {probability:.6g}\n"
                   for rank, (item, probability) in enumerate(recommendations, 1))


class TextFormatter:
    def __init__(self, output_dir=OUTPUT_DIR):
        """Initialize the text formatter."""
        self.output_dir = Path(output_dir)

    def save_report(self, report, filename):
        """Write the key=value report.

        Returns:
            Path to saved file
        """
        file_path = self.output_dir / filename
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8') as f:
            f.write(format_report(report))
        logger.info(f"Saved report to {file_path}")
        return file_path
