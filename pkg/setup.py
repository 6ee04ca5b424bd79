#!/usr/bin/env python3
"""
Bootstrap script for the crystalline measures lab.

Checks the interpreter, installs requirements, prepares ``reports/`` and
``.env``, and makes sure the bundled corpus and configs parse as JSON.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

MIN_PYTHON = (3, 9)
BUNDLED = ("data/corpus", "data/configs")


def run_step(args, label):
    """Run one subprocess step; report and return whether it succeeded."""
    print(f"🔧 {label}...")
    result = subprocess.run(args, capture_output=True, text=True)
    if result.returncode != 0:
        print(f"❌ {label} failed:\n{result.stderr.strip()}")
        return False
    print(f"✅ {label} done")
    return True


def check_interpreter():
    found = sys.version_info[:3]
    if found < MIN_PYTHON:
        print(f"❌ Python {'.'.join(map(str, MIN_PYTHON))}+ required, found {'.'.join(map(str, found))}")
        return False
    print(f"✅ Python {'.'.join(map(str, found))}")
    return True


def check_bundled_data():
    """Every corpus spec and subcommand config must be a JSON object."""
    broken = []
    count = 0
    for directory in BUNDLED:
        root = Path(directory)
        if not root.is_dir():
            print(f"❌ Missing bundled directory: {directory}")
            return False
        for path in sorted(root.glob("*.json")):
            count += 1
            try:
                if not isinstance(json.loads(path.read_text()), dict):
                    broken.append(path)
            except json.JSONDecodeError:
                broken.append(path)
    for path in broken:
        print(f"❌ Not a JSON object: {path}")
    if not broken:
        print(f"✅ {count} bundled specs and configs parse")
    return not broken


def prepare_reports():
    Path("reports").mkdir(exist_ok=True)
    print("📁 reports/ ready")
    return True


def install_requirements():
    if not Path("requirements.txt").exists():
        print("❌ requirements.txt not found")
        return False
    return run_step([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"], "Installing requirements")


def write_env():
    """Copy .env.example to .env once, suggesting a worker count."""
    env_file, template = Path(".env"), Path(".env.example")
    if env_file.exists():
        print("✅ .env already present")
        return True
    if not template.exists():
        print("⚠️  .env.example not found")
        return False
    env_file.write_text(template.read_text())
    print(f"📝 .env written; this machine has {os.cpu_count() or 1} CPUs for CRYSTAL_WORKERS")
    return True


STEPS = (
    ("interpreter", check_interpreter),
    ("bundled data", check_bundled_data),
    ("reports directory", prepare_reports),
    ("requirements", install_requirements),
    (".env", write_env),
)


def main():
    print("💎 Crystal Lab Setup")
    print("=" * 50)

    for name, step in STEPS:
        if not step():
            print(f"❌ Setup stopped at: {name}")
            sys.exit(1)

    print("\n🎉 Setup complete!")
    print("\nTry:")
    print("  python -m src poisson-check --config data/configs/poisson_unit_comb.json")
    print("  python -m src kronecker-certify --N 3 --q 4")
    print("  pytest -m 'not slow'")


if __name__ == "__main__":
    main()
