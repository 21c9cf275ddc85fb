"""Small text-output helpers shared by the CSV writers and the CLI."""


def fmt17(x):
    """Render a float with 17 significant digits (lossless round-trip)."""
    return f"{float(x):.17g}"


def write_key_values(path, items):
    """Write ``key = value`` lines; the manifest/sidecar text format."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in items:
            fh.write(f"{key} = {value}\n")
