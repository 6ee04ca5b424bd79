"""
Report emission: JSON reports, CSV series and console summaries.
"""

import json
from pathlib import Path
from typing import Iterable, Optional, Union

import pandas as pd
from pydantic import BaseModel


def report_json(report: Union[BaseModel, dict]) -> str:
    """Serialize with sorted keys so identical runs give identical bytes."""
    data = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_report(report: Union[BaseModel, dict], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report))
    return path


def series_frame(radii: Iterable[float], values: Iterable[float]) -> pd.DataFrame:
    return pd.DataFrame({"r": list(radii), "value": list(values)})


def save_series_to_csv(radii: Iterable[float], values: Iterable[float], filename: Union[str, Path]) -> pd.DataFrame:
    """Write an ``r,value`` series for plotting."""
    df = series_frame(radii, values)
    Path(filename).parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(filename, index=False)
    print(f"💾 Series saved to {filename}")
    return df


def _headline(report: dict) -> dict:
    """Scalar fields worth showing on the console."""
    return {
        key: value
        for key, value in sorted(report.items())
        if isinstance(value, (int, float, str, bool))
    }


def print_summary(command: str, report: Union[BaseModel, dict], passed: Optional[bool] = None):
    """Print a short human summary of a report."""
    data = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    print("\n" + "=" * 60)
    print(f"📊 {command.upper()} REPORT")
    print("=" * 60)
    for key, value in _headline(data).items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"   {key}: {value}")
    if passed is not None:
        print(f"\n{'✅ PASSED' if passed else '❌ FAILED'}")
    print("=" * 60)
