"""
Script to install the Chosen Path tools

Usage:
    python setup.py install
"""

try:
    from setuptools import setup
except ImportError:
    print("Not using setuptools")
    from distutils.core import setup

setup(
    name="chosenpath",
    version="0.1.0",
    scripts=["run.py"],
    packages=["chosenpath", "harness", "console"],
    license="Apache License 2.0",
    description="Chosen Path set similarity search with baselines, exponent tables and verification harnesses",
    long_description=open("README.md").read(),
    install_requires=open("requirements.txt").read(),
    python_requires=">=3.9",
)
