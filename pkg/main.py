"""rydkerr entry point for running from a source checkout.

Installed, the same commands run as `rydkerr <command>`; from the repository
root, `python main.py simulate --seed 1` is equivalent.
"""

from src.cli import main as rydkerr

if __name__ == "__main__":
  rydkerr()
