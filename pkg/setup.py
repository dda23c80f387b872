# SPDX-License-Identifier: MIT-0

import setuptools


with open("README.md") as fp:
    long_description = fp.read()

setuptools.setup(
    name="spa_toolkit",
    version="0.1.0",
    description="Structural physical approximation of positive maps, quantum channels and entanglement detection",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["unit_tests", "examples", "examples.*"]),
    install_requires=[
        "numpy~=1.24",
        "scipy~=1.10",
        "sympy~=1.12",
    ],
    entry_points={
        "console_scripts": ["spa-toolkit=lib.cli:main"],
    },
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT No Attribution License (MIT-0)",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Physics",
        "Typing :: Typed",
    ],
)
