"""doit build script for condrenyi; run with `doit` or `doit list` to see available tasks"""

import pathlib

SOURCES = sorted(str(p) for p in pathlib.Path("condrenyi").glob("*.py"))

DOIT_CONFIG = {"default_tasks": ["tests", "build_cli"]}


def task_build_cli():
    """Build the standalone CLI"""
    return {
        "actions": [
            "rm -rf dist/",
            "rm -rf build/",
            "pyinstaller --onefile --name condrenyi condrenyi/__main__.py",
        ],
        "file_dep": SOURCES,
        "targets": ["dist/condrenyi"],
    }


def task_tests():
    """Run tests"""
    return {"actions": ["python3 -m pytest tests/"], "file_dep": SOURCES, "verbosity": 2}


# name, suite, dims, alphas, trials, least converged share; None keeps the suite default
ACCEPTANCE = [
    ("duality1-222", "duality1", "2,2,2", None, 200, 0.0),
    ("duality1-232", "duality1", "2,3,2", None, 200, 0.0),
    ("duality2-222", "duality2", "2,2,2", None, 100, 0.98),
    ("duality3-222", "duality3", "2,2,2", None, 200, 0.0),
    ("duality3-232", "duality3", "2,3,2", None, 200, 0.0),
    ("ordering-22", "ordering", "2,2", None, 200, 0.0),
    ("ordering-23", "ordering", "2,3", None, 200, 0.0),
    ("ordering-33", "ordering", "3,3", None, 200, 0.0),
    ("corollary-22", "corollary", "2,2", None, 500, 0.95),
    ("corollary-23", "corollary", "2,3", None, 500, 0.95),
    ("corollary-33", "corollary", "3,3", None, 500, 0.95),
    ("monotone-alpha", "monotone-alpha", None, None, 200, 0.0),
    ("dpi", "dpi", None, None, 200, 0.0),
    ("holder", "holder", "2,3,4,5,6", None, 10000, 0.0),
    ("mosonyi", "mosonyi", "2,3,4", "1.5,2,3", 1000, 0.0),
    ("divergence-ordering", "divergence-ordering", "2,3,4", "0.5,1.5,2,3", 1000, 0.0),
    ("uncertainty1", "uncertainty1", None, None, 200, 0.0),
    ("uncertainty2", "uncertainty2", None, None, 200, 0.0),
    ("uncertainty3", "uncertainty3", None, None, 200, 0.0),
    ("maassen-uffink", "maassen-uffink", None, None, 200, 0.0),
    ("classical-oracle", "classical-oracle", None, "0.5,2,inf", 500, 0.0),
    ("limits", "limits", None, None, 200, 0.0),
    ("isometry", "isometry", None, None, 200, 0.0),
    ("stinespring", "stinespring", None, None, 200, 0.0),
]


def task_acceptance():
    """Run every verification suite at its acceptance size; fails on a violation or too few converged checks"""
    for name, suite, dims, alphas, trials, min_converged in ACCEPTANCE:
        command = f"python3 -m condrenyi verify --suite {suite} --trials {trials} --seed 0"
        if dims:
            command += f" --dims {dims}"
        if alphas:
            command += f" --alphas {alphas}"
        command += f" --min-converged {min_converged} --out reports/{name}.json"
        yield {
            "name": name,
            "actions": ["mkdir -p reports", command],
            "file_dep": SOURCES,
            "targets": [f"reports/{name}.json"],
            "verbosity": 2,
        }
