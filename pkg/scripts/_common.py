import json
import sys
from pathlib import Path

from zenochain.cli import main


def run(command, out_dir, **cfg):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg_path = out_dir / "run.json"
    cfg_path.write_text(json.dumps(cfg, indent=2))
    status = main([command, "--config", str(cfg_path), "--out", str(out_dir)])
    print(f"{command} -> {out_dir} (exit {status})", file=sys.stderr)
    return status
