import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"

# golden file -> wmzi arguments
GOLDENS = {
    "expand_unit_order3.txt": ["expand", "--order", "3", "--amplitudes", "unit", "--quiet"],
}


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, args in GOLDENS.items():
        proc = subprocess.run([sys.executable, "-m", "wmzi", *args], cwd=ROOT, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"[x] wmzi {' '.join(args)} exited {proc.returncode}: {proc.stderr.strip()}", file=sys.stderr)
            return proc.returncode
        (GOLDEN / name).write_text(proc.stdout, encoding="utf-8")
        print(f"[ok] wrote {GOLDEN / name}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
