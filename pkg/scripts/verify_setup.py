"""
Setup check for coxperc.

Verifies the interpreter, the installed packages, the configuration files
and the output directory, then runs one tiny crossing estimate.
Exit status is 0 when every check passes.
"""

import importlib
import sys
from pathlib import Path
from typing import Callable, List, Tuple

# Add src to path
ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

PACKAGES = ("numpy", "scipy", "pandas", "matplotlib", "pydantic", "yaml", "dotenv")
CONFIG_FILES = ("config/config.yaml", "config/presets.yaml")
ENTRY_POINTS = (
    ("src.lattice", "make_params"),
    ("src.geometry", "delaunay_triangulate"),
    ("src.environment", "build_environment"),
    ("src.cox", "sample_driver"),
    ("src.percolation", "evaluate_f_n"),
    ("src.analysis", "estimate_theta"),
    ("src.cli", "execute"),
)


def report(ok: bool, text: str) -> bool:
    print(f"   {'✅' if ok else '❌'} {text}")
    return ok


def check_python() -> bool:
    v = sys.version_info
    return report(v >= (3, 9), f"Python {v.major}.{v.minor}.{v.micro} (need 3.9+)")


def check_packages() -> bool:
    results = []
    for name in PACKAGES:
        try:
            importlib.import_module(name)
            results.append(report(True, name))
        except ImportError:
            results.append(report(False, f"{name} missing: pip install -r requirements.txt"))
    return all(results)


def check_config_files() -> bool:
    return all([report((ROOT / name).exists(), name) for name in CONFIG_FILES])


def check_output_dir() -> bool:
    from src.utils import get_config

    out = Path(get_config().get_output_dir())
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("ok")
        probe.unlink()
    except OSError as e:
        return report(False, f"{out} is not writable ({e}); set COXPERC_OUTPUT_DIR")
    return report(True, f"{out} is writable")


def check_modules() -> bool:
    results = []
    for module_name, attr in ENTRY_POINTS:
        try:
            getattr(importlib.import_module(module_name), attr)
            results.append(report(True, f"{module_name}.{attr}"))
        except Exception as e:
            results.append(report(False, f"{module_name}.{attr}: {e}"))
    return all(results)


def check_smoke_run() -> bool:
    from src.analysis import estimate_theta
    from src.lattice import make_params

    est = estimate_theta(make_params(M=1, b="1/5", L=1), 1.0, 5, 2, 0, 1)
    return report(True, f"theta_5(1.0) = {est.theta:.2f} over {est.trials} trials")


CHECKS: List[Tuple[str, str, Callable[[], bool]]] = [
    ("🐍", "Python", check_python),
    ("📦", "Packages", check_packages),
    ("⚙️ ", "Config files", check_config_files),
    ("📁", "Output directory", check_output_dir),
    ("🧪", "Project modules", check_modules),
    ("🎲", "Smoke run", check_smoke_run),
]


def main() -> int:
    print("🔍 coxperc setup check\n")
    failed = []
    for icon, name, check in CHECKS:
        print(f"{icon} {name}")
        try:
            ok = check()
        except Exception as e:
            ok = report(False, f"error: {e}")
        if not ok:
            failed.append(name)

    print()
    if failed:
        print(f"⚠️  {len(failed)}/{len(CHECKS)} checks failed: {', '.join(failed)}")
        return 1
    print(f"🎉 All {len(CHECKS)} checks passed. Try:")
    print("   python scripts/coxperc.py check-env --preset tiny")
    print('   python scripts/coxperc.py sweep --preset tiny --lambda-list "[0.5, 1, 2]"')
    return 0


if __name__ == "__main__":
    sys.exit(main())
