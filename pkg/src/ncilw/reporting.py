"""Deterministic CSV/JSON writers, run manifests, and figure rendering.

Numeric CSV cells are formatted with repr-exact %.17g so identical runs
produce byte-identical files.  JSON is written with sorted keys.  Every
emitted file is re-read and re-validated immediately after writing
(column counts for CSV, parseability for JSON); files are written
atomically via a temporary sibling.
"""

import csv
import json
import os
import time

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import IoError

#: environment variable overriding the output directory
OUTPUT_DIR_ENV = "NCILW_OUTPUT_DIR"


def resolve_out_dir(cli_value=None, config_value=None):
    """Precedence: CLI flag, then environment, then config, then cwd."""
    out = cli_value or os.environ.get(OUTPUT_DIR_ENV) or config_value or "."
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _fmt(value):
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def write_csv(path, header, rows):
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    _revalidate_csv(path, len(header))
    return path


def _revalidate_csv(path, n_columns):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for i, row in enumerate(csv.reader(fh)):
                if len(row) != n_columns:
                    raise IoError(
                        f"{path}: row {i} has {len(row)} columns, "
                        f"expected {n_columns}"
                    )
    except OSError as exc:
        raise IoError(f"cannot re-read {path}: {exc}") from exc


def _json_default(obj):
    # numpy scalars (and 0-d arrays) carry their Python value in .item()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, payload):
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    try:
        with open(path, encoding="utf-8") as fh:
            json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"{path}: emitted JSON failed re-validation: {exc}") from exc
    return path


def make_manifest(subcommand, config, checks, extras=None, partial=False):
    """Run manifest: config echo, per-check pass/fail, wall-clock stamp."""
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "checks": checks,
        "passed": all(c["passed"] for c in checks) and not partial,
        "partial": partial,
        "wallclock_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extras:
        manifest.update(extras)
    return manifest


def save_figure(fig, path):
    try:
        fig.savefig(path, dpi=120, bbox_inches="tight")
    except OSError as exc:
        raise IoError(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def new_figure(**kwargs):
    return plt.subplots(**kwargs)
