# src/output/csv_formatter.py
from pathlib import Path

from config.settings import OUTPUT_DIR
from config.logging_config import logger


class CSVFormatter:
    def __init__(self, output_dir=OUTPUT_DIR):
        """Initialize the CSV formatter."""
        self.output_dir = Path(output_dir)

    def save_table(self, table, filename):
        """Save a DataFrame as CSV (no index column).

        Args:
            table: pandas DataFrame
            filename: Output filename; absolute paths are used as given

        Returns:
            Path to saved file
        """
        if not str(filename).endswith('.csv'):
            filename = f"{filename}.csv"

        file_path = self.output_dir / filename
        file_path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(file_path, index=False, float_format="%.10g")

        logger.info(f"Saved {len(table)} rows to {file_path}")
        return file_path

    def save_per_position(self, report, filename):
        """Per-position breakdown (position, votes, cf_accuracy, mean_log_prob)."""
        return self.save_table(report.per_position, filename)
