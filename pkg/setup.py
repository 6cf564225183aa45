#!/usr/bin/env python3
"""
Setup script for the evasion-path analysis toolkit
"""

import subprocess
import sys
from pathlib import Path


def run_command(command, cwd=None):
    """Run a shell command and return success status"""
    try:
        subprocess.run(command, shell=True, check=True, cwd=cwd, capture_output=True, text=True)
        print(f"✓ {command}")
        return True
    except subprocess.CalledProcessError as e:
        print(f"✗ {command}")
        print(f"Error: {e.stderr}")
        return False


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("❌ Python 3.9 or higher is required")
        return False
    print(f"✓ Python {sys.version_info.major}.{sys.version_info.minor}")
    return True


def setup_backend():
    """Install dependencies and generate the fixture scenarios"""
    print("\n🔧 Setting up backend...")

    backend_dir = Path("backend")
    if not backend_dir.exists():
        print("❌ Backend directory not found")
        return False

    if not run_command(f"{sys.executable} -m pip install -r requirements.txt", cwd=backend_dir):
        return False

    if not run_command(f"{sys.executable} -m utils.fixture_builder", cwd=backend_dir):
        return False
    return True


def create_env_file():
    """Write backend/.env with the default settings"""
    backend_env = Path("backend/.env")
    if backend_env.exists():
        return
    with open(backend_env, "w") as f:
        f.write("""# Evasion analysis settings
# EVASION_FIXTURES=/path/to/fixtures
EVASION_FIELD=2
EVASION_EVENT_TOL=1e-9
EVASION_GRID_H_FACTOR=0.05
EVASION_LOG_LEVEL=INFO
EVASION_MAX_WORKERS=4
""")
    print("✓ Created backend/.env")


def main():
    """Main setup function"""
    print("🚀 Evasion-path analysis setup")
    print("=" * 50)

    if not check_python_version():
        sys.exit(1)

    create_env_file()

    if not setup_backend():
        print("❌ Backend setup failed")
        sys.exit(1)

    print("\n🎉 Setup complete!")
    print("\nNext steps:")
    print("1. cd backend && python main.py --help")
    print("2. python main.py report --all-fixtures --no-timings")
    print("3. pytest")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build frontend (pip/setuptools): metadata lives in pyproject.toml
        from setuptools import setup

        setup()
    else:
        main()
