"""
Report renderers: JSON, markdown and plain text, all carrying the same fields.
"""

import json
from typing import Callable, Dict, List

from .catalog import CheckDescriptor
from .runner import Report

FORMATS = ("json", "markdown", "text")


def render_json(report: Report, timestamp: bool = True) -> str:
    return json.dumps(report.as_dict(timestamp), indent=2, ensure_ascii=False) + "\n"


def _markdown_cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", "<br>")


def render_markdown(report: Report, timestamp: bool = True) -> str:
    data = report.as_dict(timestamp)
    lines = [f"# Verification report (version {data['version']})", ""]
    if "generated_at" in data:
        lines += [f"Generated at {data['generated_at']}", ""]
    lines.append("## Conventions")
    lines.append("")
    for key, value in data["conventions"].items():
        lines.append(f"- {key}: {value}")
    lines.append("")
    lines.append("## Checks")
    lines.append("")
    header = ["id", "paper_ref", "status", "residual_terms", "residual_text"]
    if timestamp:
        header.append("duration_ms")
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for check in data["checks"]:
        cells = [_markdown_cell(str(check.get(column, ""))) for column in header]
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    lines.append("## Totals")
    lines.append("")
    for status, count in data["totals"].items():
        lines.append(f"- {status}: {count}")
    return "\n".join(lines) + "\n"


def render_text(report: Report, timestamp: bool = True) -> str:
    data = report.as_dict(timestamp)
    conventions = ", ".join(f"{k}={v}" for k, v in data["conventions"].items())
    lines = [f"conformal-observables {data['version']} ({conventions})"]
    if "generated_at" in data:
        lines.append(f"generated at {data['generated_at']}")
    for check in data["checks"]:
        line = f"{check['status'].upper():5} {check['id']}  [{check['paper_ref']}]"
        if check["residual_terms"]:
            line += f"  residual_terms={check['residual_terms']}"
        if "duration_ms" in check:
            line += f"  {check['duration_ms']} ms"
        lines.append(line)
        if "residual_text" in check:
            lines.extend(f"      {row}" for row in check["residual_text"].splitlines())
    totals = data["totals"]
    lines.append(" ".join(f"{status}={count}" for status, count in totals.items()))
    return "\n".join(lines) + "\n"


RENDERERS: Dict[str, Callable[..., str]] = {
    "json": render_json,
    "markdown": render_markdown,
    "text": render_text,
}


def render(report: Report, fmt: str = "text", timestamp: bool = True) -> str:
    return RENDERERS[fmt](report, timestamp)


def render_catalog(descriptors: List[CheckDescriptor], fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps([d.as_dict() for d in descriptors], indent=2, ensure_ascii=False) + "\n"
    if fmt == "markdown":
        lines = ["| id | paper_ref | module | quote |", "|---|---|---|---|"]
        lines += [
            f"| {d.id} | {_markdown_cell(d.paper_ref)} | {d.module} | {_markdown_cell(d.quote)} |"
            for d in descriptors
        ]
        lines.append("")
        lines.append(f"{len(descriptors)} checks")
        return "\n".join(lines) + "\n"
    lines = [f"{d.id}  [{d.paper_ref}]" for d in descriptors]
    lines.append(f"{len(descriptors)} checks")
    return "\n".join(lines) + "\n"
