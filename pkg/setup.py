"""
setup.py for condrenyi

Usage:
    pip install .
"""

import pathlib

from setuptools import find_packages, setup

# The version number; do not change this manually! It is updated by bumpversion (https://github.com/c4urself/bump2version)
__version__ = "0.1.0"

HERE = pathlib.Path(__file__).parent


def requirements() -> list[str]:
    """Runtime requirements, one per line of requirements.txt"""
    lines = (HERE / "requirements.txt").read_text().splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]


setup(
    name="condrenyi",
    version=__version__,
    description="Quantum Rényi divergences, conditional Rényi entropies and checks of their duality relations",
    long_description=(HERE / "README.md").read_text(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=requirements(),
    entry_points={"console_scripts": ["condrenyi=condrenyi.cli:cli"]},
)
