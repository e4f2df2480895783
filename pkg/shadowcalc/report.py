"""
Tabular and PDF output for coherence suites.
"""
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import pandas as pd
from fpdf import FPDF

from shadowcalc.relations import CoherenceReport

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

SUMMARY_COLUMNS = ["suite", "figure", "expected", "verdict", "passed", "instances", "errors"]
VERDICT_COLORS = {
    "equal": (200, 240, 200),
    "unequal-as-expected": (200, 240, 200),
    "unequal": (255, 210, 210),
    "unexpected-equal": (255, 210, 210),
}
MAX_FAILURE_ROWS = 20


def safe(text) -> str:
    return str(text).encode('latin-1', 'replace').decode('latin-1')


# =============================================================================
# 2. TABLES
# =============================================================================

def summary_row(report: CoherenceReport) -> Dict:
    return {
        "suite": report.name,
        "figure": report.figure,
        "expected": report.expected,
        "verdict": report.verdict,
        "passed": report.passed,
        "instances": len(report.verdicts),
        "errors": sum(1 for v in report.verdicts if v["error"]),
    }


def summary_frame(reports: Iterable[CoherenceReport]) -> pd.DataFrame:
    return pd.DataFrame([summary_row(r) for r in reports], columns=SUMMARY_COLUMNS)


def verdict_frame(reports: Iterable[CoherenceReport]) -> pd.DataFrame:
    frames = [r.to_frame() for r in reports]
    if not frames:
        return pd.DataFrame(columns=["suite", "figure", "instance", "equal", "error"])
    return pd.concat(frames, ignore_index=True)


def failures(report: CoherenceReport) -> pd.DataFrame:
    """Instances that went against the expected verdict."""
    frame = report.to_frame()
    if frame.empty:
        return frame
    wanted = report.expected == "equal"
    return frame[(frame["equal"] != wanted) | (frame["error"] != "")]


# =============================================================================
# 3. PDF REPORT
# =============================================================================

class PDFReport(FPDF):
    title_text = "Coherence Suite Report"

    def header(self):
        self.set_font('Arial', 'B', 15)
        self.cell(0, 10, self.title_text, 0, 1, 'C')
        self.ln(5)

    def footer(self):
        self.set_y(-15)
        self.set_font('Arial', 'I', 8)
        self.cell(0, 10, f'Page {self.page_no()}', 0, 0, 'C')


def _summary_table(pdf: PDFReport, frame: pd.DataFrame) -> None:
    widths = [52, 22, 36, 16, 16, 16]
    heads = ["Suite", "Expected", "Verdict", "Passed", "Runs", "Errors"]
    pdf.set_font("Arial", 'B', 9)
    pdf.set_fill_color(200, 220, 255)
    for w, h in zip(widths, heads):
        pdf.cell(w, 8, h, 1, 0, 'C', 1)
    pdf.ln()
    pdf.set_font("Arial", size=9)
    for _, row in frame.iterrows():
        pdf.set_fill_color(*VERDICT_COLORS.get(row["verdict"], (255, 255, 255)))
        values = [row["suite"], row["expected"], row["verdict"], "yes" if row["passed"] else "no",
                  row["instances"], row["errors"]]
        for w, v in zip(widths, values):
            pdf.cell(w, 8, safe(v)[:30], 1, 0, 'L', 1)
        pdf.ln()


def write_pdf(reports: List[CoherenceReport], path: Union[str, Path],
              settings: Optional[Dict] = None) -> Path:
    """One summary table, then the failing instances of each suite."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pdf = PDFReport()
    pdf.add_page()
    pdf.set_font("Arial", size=10)
    pdf.cell(0, 10, f"Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}", ln=True)
    if settings:
        pdf.cell(0, 10, safe(", ".join(f"{k}={v}" for k, v in sorted(settings.items()))), ln=True)
    pdf.ln(5)

    pdf.set_font("Arial", 'B', 12)
    pdf.cell(0, 10, "1. Summary", ln=True)
    _summary_table(pdf, summary_frame(reports))
    pdf.ln(5)

    pdf.set_font("Arial", 'B', 12)
    pdf.cell(0, 10, "2. Failing Instances", ln=True)
    any_failed = False
    for report in reports:
        bad = failures(report)
        if bad.empty:
            continue
        any_failed = True
        pdf.set_font("Arial", 'B', 10)
        pdf.cell(0, 8, safe(f"{report.name} ({report.figure})"), ln=True)
        pdf.set_font("Arial", size=9)
        for _, row in bad.head(MAX_FAILURE_ROWS).iterrows():
            pdf.multi_cell(0, 6, safe(f"instance {row['instance']}: equal={row['equal']} {row['error']}"))
    if not any_failed:
        pdf.set_font("Arial", 'I', 10)
        pdf.cell(0, 10, "Every suite returned its expected verdict.", ln=True)

    try:
        pdf.output(str(path))
    except Exception as e:
        logging.error(f"Failed to write PDF report {path}: {e}")
        raise
    logger.info("wrote %s", path)
    return path
